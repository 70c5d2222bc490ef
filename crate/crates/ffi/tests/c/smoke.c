#include <stdio.h>
#include <string.h>
#include "nestsim.h"

static const char *AB =
    "des (0,5,7)\n(0,\"a\",1)\n(1,\"b\",2)\n(3,\"a\",4)\n(4,\"b\",5)\n(3,\"a\",6)\n";

int main(void) {
    NsLts *lts = NULL;
    if (ns_lts_parse_aut(AB, &lts) != NS_STATUS_OK) return 10;

    bool yes = false, no = true;
    if (ns_check(lts, "simeq", 0, 3, &yes) != NS_STATUS_OK || !yes) return 11;
    if (ns_check(lts, "bisim", 0, 3, &no) != NS_STATUS_OK || no) return 12;

    NsRelation *oracle = NULL, *logic = NULL;
    if (ns_relation_compute(lts, "nsim:2", &oracle) != NS_STATUS_OK) return 13;
    if (ns_relation_characterized(lts, "nsim:2", &logic) != NS_STATUS_OK) return 14;
    if (!ns_relation_equal(oracle, logic)) return 15;

    if (ns_check(lts, "nsim:0", 0, 0, &yes) != NS_STATUS_INVALID_KIND) return 16;
    if (strlen(ns_last_error_message()) == 0) return 17;

    printf("%zu %zu\n", ns_lts_num_states(lts), ns_relation_size(oracle));
    ns_relation_free(oracle);
    ns_relation_free(logic);
    ns_lts_free(lts);
    return 0;
}
