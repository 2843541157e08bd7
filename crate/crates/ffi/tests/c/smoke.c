#include <math.h>
#include <stdio.h>
#include "okd.h"

#define CHECK(cond)                                                    \
  do {                                                                 \
    if (!(cond)) {                                                     \
      const char *e = okd_last_error();                                \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond,   \
              e ? e : "no error");                                     \
      return 1;                                                        \
    }                                                                  \
  } while (0)

int main(void) {
  double p_err = 0.0;
  CHECK(okd_helstrom_error_probability(1.0, &p_err) == OKD_STATUS_OK);
  CHECK(fabs(p_err - 0.10246995118967494635) < 1e-15);

  OkdConfig *cfg = okd_config_new();
  CHECK(cfg != NULL);
  CHECK(okd_config_set_tolerances(cfg, -1.0, 1e-10) == OKD_STATUS_INVALID_ARGUMENT);
  CHECK(okd_last_error() != NULL);

  OkdRate rate;
  CHECK(okd_optimal_rate(cfg, OKD_SCENARIO_HELSTROM, 1000.0, &rate) == OKD_STATUS_OK);
  CHECK(okd_last_error() == NULL);
  CHECK(fabs(rate.delta_e - 1.0) < 0.05);
  CHECK(rate.scenario == OKD_SCENARIO_HELSTROM);

  int32_t scenarios[] = {OKD_SCENARIO_HELSTROM, OKD_SCENARIO_HOLEVO};
  OkdSweep *sweep = NULL;
  CHECK(okd_sweep_run(cfg, scenarios, 2, 10.0, 100.0, 3, true, &sweep) == OKD_STATUS_OK);
  CHECK(okd_sweep_len(sweep) == 6);
  OkdSweepRow row;
  CHECK(okd_sweep_row(sweep, 5, &row) == OKD_STATUS_OK);
  CHECK(row.scenario == OKD_SCENARIO_HOLEVO && row.status == OKD_STATUS_OK);
  CHECK(okd_sweep_row(sweep, 6, &row) == OKD_STATUS_INDEX_OUT_OF_RANGE);
  okd_sweep_free(sweep);

  CHECK(okd_key_rate(cfg, 42, 0.3, 10.0, &rate) == OKD_STATUS_INVALID_ARGUMENT);
  okd_config_free(cfg);
  puts("ok");
  return 0;
}
