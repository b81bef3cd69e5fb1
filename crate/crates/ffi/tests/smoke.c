#include <math.h>
#include <stdio.h>
#include "telescore.h"

#define CHECK(cond)                                                    \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "check failed at line %d: %s\n", __LINE__, #cond); \
      return 1;                                                        \
    }                                                                  \
  } while (0)

int main(void) {
  TsNoiseModel *m = NULL;
  CHECK(ts_model_parse("bit_flip:p=0.7", &m) == TS_OK);
  TsScore s;
  CHECK(ts_score(m, 0.5, 1, 2.5, &s) == TS_OK);
  CHECK(fabs(s.f - 0.8) < 1e-15);
  CHECK(s.quantum_useful);

  double k, a;
  CHECK(ts_k_star(m, 0.0, 0.5, &k, &a) == TS_OK);
  CHECK(fabs(k - 8.94427191) < 1e-6);
  ts_model_free(m);

  CHECK(ts_model_parse("nope", &m) == TS_INVALID_MODEL);
  char buf[128];
  CHECK(ts_last_error(buf, sizeof buf) > 0);

  TsCrossover c;
  CHECK(ts_alpha_nk(0.7, 4.0, &c) == TS_OK);
  CHECK(c.has_alpha_nk && fabs(c.alpha_nk - 0.056) < 1e-3);
  printf("ok\n");
  return 0;
}
