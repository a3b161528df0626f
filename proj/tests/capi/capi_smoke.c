/* Exercises the shared library through its C header only. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "nullfol/nullfol.h"

static int failures = 0;

#define EXPECT(cond)                                            \
  do {                                                          \
    if (!(cond)) {                                              \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                               \
    }                                                           \
  } while (0)

int main(void) {
  nf_grid* g = NULL;
  EXPECT(nf_grid_create(24, 10, 15, &g) == NF_ERR_INVALID_ARGUMENT);
  EXPECT(strlen(nf_last_error()) > 0);
  EXPECT(nf_grid_create(24, 48, 15, &g) == NF_OK);
  int nodes = 0, ncoeff = 0;
  EXPECT(nf_grid_size(g, &nodes, &ncoeff) == NF_OK);
  EXPECT(nodes == 24 * 48 && ncoeff == 24 * 24);

  nf_metric* m = NULL;
  EXPECT(nf_metric_create(g, 1.0, 0.5, 0.01, 3, &m) == NF_OK);
  EXPECT(nf_metric_create(g, 1.0, -1.0, 0.01, 3, &m) != NF_OK);

  /* constant data stays constant */
  nf_field* c = NULL;
  EXPECT(nf_field_constant(g, 0.05, &c) == NF_OK);
  nf_trajectory* t = NULL;
  EXPECT(nf_evolve(m, c, 4.0, 0.25, 2.0, &t) == NF_OK);
  int status = -1, rows = 0;
  EXPECT(nf_trajectory_status(t, &status) == NF_OK && status == 0);
  EXPECT(nf_trajectory_rows(t, &rows) == NF_OK && rows > 2);
  double row[8];
  EXPECT(nf_trajectory_row(t, rows - 1, row) == NF_OK);
  EXPECT(row[0] == 4.0 && row[1] == 0.05 && row[2] == 0.0);
  EXPECT(nf_trajectory_row(t, rows, row) == NF_ERR_INVALID_ARGUMENT);
  nf_field* fin = NULL;
  EXPECT(nf_trajectory_final(t, &fin) == NF_OK);
  double* vals = malloc(sizeof(double) * (size_t)nodes);
  EXPECT(nf_field_values(fin, vals, nodes) == NF_OK);
  EXPECT(vals[0] == 0.05 && vals[nodes - 1] == 0.05);
  free(vals);

  /* a Y_1^0 graph: coefficients survive the round trip */
  double* coeffs = calloc((size_t)ncoeff, sizeof(double));
  coeffs[2] = 0.01;
  nf_field* y = NULL;
  EXPECT(nf_field_from_coeffs(g, coeffs, ncoeff + 1, &y) == NF_ERR_INVALID_ARGUMENT);
  EXPECT(nf_field_from_coeffs(g, coeffs, 4, &y) == NF_OK);
  EXPECT(nf_field_coeffs(y, coeffs, ncoeff) == NF_OK);
  EXPECT(fabs(coeffs[2] - 0.01) < 1e-15 && fabs(coeffs[0]) < 1e-15);
  free(coeffs);

  /* configs */
  nf_config* cfg = NULL;
  EXPECT(nf_config_parse("[grid]\nnlat = x\n", &cfg) == NF_ERR_CONFIG);
  EXPECT(strstr(nf_last_error(), "line 2") != NULL);
  EXPECT(nf_config_default(&cfg) == NF_OK);
  EXPECT(nf_config_set_mode(cfg, "sweep") == NF_OK);
  EXPECT(nf_config_set_mode(cfg, "dance") == NF_ERR_CONFIG);
  EXPECT(nf_config_set(cfg, "epsilon", "0.02") == NF_OK);
  EXPECT(nf_config_add_sweep_param(cfg, "delta_o=0.01:0.01:0.02") == NF_OK);
  EXPECT(nf_config_add_sweep_param(cfg, "delta_o") == NF_ERR_CONFIG);
  size_t need = 0;
  EXPECT(nf_config_to_toml(cfg, NULL, 0, &need) == NF_OK && need > 1);
  char* text = malloc(need);
  EXPECT(nf_config_to_toml(cfg, text, need, NULL) == NF_OK);
  EXPECT(strstr(text, "mode = \"sweep\"") != NULL);
  EXPECT(strstr(text, "epsilon = 0.02") != NULL);
  nf_config* again = NULL;
  EXPECT(nf_config_parse(text, &again) == NF_OK);
  char* text2 = malloc(need);
  EXPECT(nf_config_to_toml(again, text2, need, NULL) == NF_OK);
  EXPECT(strcmp(text, text2) == 0);
  free(text);
  free(text2);

  nf_config_free(again);
  nf_config_free(cfg);
  nf_field_free(y);
  nf_field_free(fin);
  nf_trajectory_free(t);
  nf_field_free(c);
  nf_metric_free(m);
  nf_grid_free(g);
  printf("%s (%d failures)\n", failures ? "FAIL" : "ok", failures);
  return failures ? 1 : 0;
}
