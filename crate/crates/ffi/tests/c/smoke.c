#include <math.h>
#include <stdio.h>
#include "decimaxsum.h"

int main(void) {
    DmsProblem *p = NULL;
    if (dms_problem_generate_ising(3, 1.6, 0.05, 7, &p) != DMS_STATUS_OK) {
        fprintf(stderr, "%s\n", dms_last_error_message());
        return 1;
    }
    DmsSolution *s = NULL;
    DmsSolveOptions opts = dms_solve_options_default();
    if (dms_solve(p, "maxsum_ad_vp", 11, &opts, &s) != DMS_STATUS_OK) {
        fprintf(stderr, "%s\n", dms_last_error_message());
        return 1;
    }
    size_t n = dms_problem_num_variables(p);
    size_t values[9];
    double opt = 0.0;
    size_t best[9];
    if (dms_solution_values(s, values, n) != DMS_STATUS_OK) return 1;
    if (dms_brute_force_optimum(p, &opt, best, 9) != DMS_STATUS_OK) return 1;
    if (fabs(dms_solution_utility(s) - opt) > 1e-9) return 2;
    if (dms_solve(p, "bogus", 0, NULL, &s) != DMS_STATUS_INVALID_ARGUMENT) return 3;
    dms_solution_free(s);
    dms_problem_free(p);
    printf("ok %zu\n", n);
    return 0;
}
