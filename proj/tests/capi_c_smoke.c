/* Compiles the public header as C and drives a minimal session. */
#include <math.h>
#include <stdio.h>

#include "modsum/modsum.h"

int main(void) {
  msum_function* f = NULL;
  msum_function* psi = NULL;
  msum_weight* w = NULL;
  msum_map* m = NULL;
  msum_modsum_report r;
  msum_rule rule = {MSUM_RULE_LEFT, 0};
  int ok = 1;

  ok &= msum_function_parse("x", 0.0, 1.0, NULL, NULL, &f) == MSUM_OK;
  ok &= msum_function_parse("1", 0.0, 1.0, NULL, NULL, &psi) == MSUM_OK;
  ok &= msum_weight_create(psi, NULL, &w) == MSUM_OK;
  ok &= msum_map_parse("gamma:0.5", w, &m) == MSUM_OK;
  ok &= msum_modified_sums(f, w, m, 2, rule, &r) == MSUM_OK;
  ok &= fabs(r.s - 0.125) < 1e-12;

  msum_map_free(m);
  msum_weight_free(w);
  msum_function_free(psi);
  msum_function_free(f);
  printf("%s %s\n", msum_version(), ok ? "ok" : "FAILED");
  return ok ? 0 : 1;
}
