/* Exercises the shared library through its C header only. */
#include "echolab/echolab.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                     \
    do                                                                   \
    {                                                                    \
        if (!(cond))                                                     \
        {                                                                \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond);   \
            ++failures;                                                  \
        }                                                                \
    } while (0)

int main(void)
{
    EXPECT(strlen(echolab_version()) > 0);
    EXPECT(strcmp(echolab_status_name(ECHOLAB_E_RANGE), "E_RANGE") == 0);

    echolab_config* cfg = NULL;
    EXPECT(echolab_config_parse("experiment = loschmidt\nseed = 1\nN = 0\n", NULL, 0, &cfg) == ECHOLAB_E_RANGE);
    EXPECT(cfg == NULL);
    EXPECT(strlen(echolab_last_error()) > 0);
    EXPECT(echolab_config_parse("experiment = loschmidt\nseed = 1\nbogus = 0\n", NULL, 0, &cfg) ==
           ECHOLAB_E_UNKNOWN_KEY);
    EXPECT(echolab_config_parse(NULL, NULL, 0, &cfg) == ECHOLAB_E_ARGUMENT);

    const char* ov[] = {"n_max=8", "dK=0"};
    EXPECT(echolab_config_parse("experiment = loschmidt\nseed = 1\nN = 64\n", ov, 2, &cfg) == ECHOLAB_OK);
    EXPECT(strcmp(echolab_config_experiment(cfg), "loschmidt") == 0);
    EXPECT(strcmp(echolab_last_error(), "") == 0);

    echolab_table* t = NULL;
    EXPECT(echolab_run(cfg, 1, 1, &t) == ECHOLAB_OK);
    EXPECT(echolab_table_rows(t) == 9);
    EXPECT(echolab_table_cols(t) == 3);
    EXPECT(strcmp(echolab_table_column(t, 1), "value") == 0);
    for (size_t r = 0; r < echolab_table_rows(t); ++r)
        EXPECT(fabs(echolab_table_value(t, r, 1) - 1.0) < 1e-12);

    char* csv = NULL;
    size_t len = 0;
    EXPECT(echolab_table_emit(t, "csv", &csv, &len) == ECHOLAB_OK);
    EXPECT(csv != NULL && strlen(csv) == len);
    echolab_table* back = NULL;
    EXPECT(echolab_table_parse_csv(csv, &back) == ECHOLAB_OK);
    EXPECT(echolab_table_rows(back) == 9);
    char* csv2 = NULL;
    EXPECT(echolab_table_emit(back, "csv", &csv2, &len) == ECHOLAB_OK);
    EXPECT(strcmp(csv, csv2) == 0);
    EXPECT(echolab_table_emit(t, "xml", &csv2, &len) != ECHOLAB_OK);
    echolab_free(csv);
    echolab_free(csv2);
    echolab_table_free(back);
    echolab_table_free(t);
    echolab_config_free(cfg);

    EXPECT(echolab_experiment_count() == 10);
    EXPECT(echolab_recipe_count() > 0);
    const char* text = NULL;
    EXPECT(echolab_recipe_config(echolab_recipe_name(0), &text) == ECHOLAB_OK && text != NULL);
    EXPECT(echolab_recipe_config("nope", &text) == ECHOLAB_E_UNKNOWN_KEY);

    /* direct engines: identical maps give a unit echo, evolution keeps the norm */
    echolab_floquet *f0 = NULL, *f1 = NULL;
    echolab_state* psi = NULL;
    EXPECT(echolab_floquet_rotator(128, 9.95, &f0) == ECHOLAB_OK);
    EXPECT(echolab_floquet_rotator(128, 10.05, &f1) == ECHOLAB_OK);
    echolab_floquet* odd = NULL;
    EXPECT(echolab_floquet_rotator(127, 9.95, &odd) == ECHOLAB_E_RANGE);
    EXPECT(odd == NULL);
    EXPECT(echolab_state_torus_packet(128, 2.0, 1.0, 0.0, &psi) == ECHOLAB_OK);
    EXPECT(echolab_floquet_dim(f0) == 128 && echolab_state_dim(psi) == 128);
    double values[11];
    EXPECT(echolab_loschmidt(psi, f0, f0, 10, values) == ECHOLAB_OK);
    for (int i = 0; i <= 10; ++i)
        EXPECT(fabs(values[i] - 1.0) < 1e-12);
    EXPECT(echolab_loschmidt(psi, f0, f1, 10, values) == ECHOLAB_OK);
    EXPECT(values[10] < 1.0);
    EXPECT(echolab_state_evolve(psi, f0, 5) == ECHOLAB_OK);
    double* amp = malloc(2 * 128 * sizeof(double));
    EXPECT(echolab_state_amplitudes(psi, amp, 2 * 128) == ECHOLAB_OK);
    double nrm = 0;
    for (int i = 0; i < 256; ++i)
        nrm += amp[i] * amp[i];
    EXPECT(fabs(nrm - 1.0) < 1e-12);
    EXPECT(echolab_state_amplitudes(psi, amp, 10) != ECHOLAB_OK);
    free(amp);

    echolab_floquet* top = NULL;
    echolab_state* spin = NULL;
    EXPECT(echolab_floquet_top(20, 3.0, 0.0, &top) == ECHOLAB_OK);
    EXPECT(echolab_state_spin_coherent(20, 1.0, 0.5, &spin) == ECHOLAB_OK);
    EXPECT(echolab_state_evolve(spin, f0, 1) == ECHOLAB_E_BASIS);
    EXPECT(echolab_state_evolve(spin, top, 3) == ECHOLAB_OK);

    echolab_state_free(spin);
    echolab_floquet_free(top);
    echolab_state_free(psi);
    echolab_floquet_free(f0);
    echolab_floquet_free(f1);

    if (failures)
        fprintf(stderr, "%d failure(s)\n", failures);
    return failures ? 1 : 0;
}
