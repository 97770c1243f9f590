#include <stdio.h>
#include <string.h>
#include "ultrachain.h"

#define CHECK(e) do { if (!(e)) { fprintf(stderr, "failed: %s\n", #e); return 1; } } while (0)

int main(void) {
    const char *u4 =
        "{\"points\":[\"a\",\"b\",\"c\",\"d\"],"
        "\"dist\":[[\"0\",\"1\",\"2\",\"8\"],[\"1\",\"0\",\"2\",\"8\"],"
        "[\"2\",\"2\",\"0\",\"8\"],[\"8\",\"8\",\"8\",\"0\"]]}";
    UcSpace *s = NULL;
    CHECK(uc_space_from_json(u4, &s) == UC_STATUS_OK);
    char *d = NULL;
    CHECK(uc_space_distance(s, 1, 2, &d) == UC_STATUS_OK);
    CHECK(strcmp(d, "2") == 0);
    uc_string_free(d);

    UcChain *c = NULL;
    CHECK(uc_chain_from_space(s, UC_FLAVOR_D_MINUS, &c) == UC_STATUS_DOMAIN);
    CHECK(strstr(uc_last_error(), "diameter") != NULL);
    CHECK(uc_chain_from_space(s, UC_FLAVOR_D, &c) == UC_STATUS_OK);
    int64_t lo, hi;
    CHECK(uc_chain_window(c, &lo, &hi) == UC_STATUS_OK);
    CHECK(lo == -1 && hi == 3);
    uc_chain_free(c);

    uc_space_free(s);
    s = NULL;
    CHECK(uc_space_from_json("{", &s) == UC_STATUS_JSON);
    CHECK(s == NULL);
    printf("ok\n");
    return 0;
}
