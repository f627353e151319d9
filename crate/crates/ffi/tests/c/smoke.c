#include <math.h>
#include <stdio.h>
#include <string.h>

#include "scaling_laws.h"

#define CHECK(cond)                                                        \
    do {                                                                   \
        if (!(cond)) {                                                     \
            fprintf(stderr, "check failed at line %d: %s (%s)\n", __LINE__, \
                    #cond, sl_last_error_message());                       \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    SlPoints *points = NULL;
    CHECK(sl_points_from_fixture("table1", &points) == SL_STATUS_OK);
    CHECK(sl_points_len(points) == 4);

    SlFitOptions opts = sl_fit_options_default();
    SlFit *fit = NULL;
    CHECK(sl_fit_data_law(points, &opts, &fit) == SL_STATUS_OK);

    SlFitSummary summary;
    CHECK(sl_fit_summary(fit, &summary) == SL_STATUS_OK);
    CHECK(summary.converged);
    CHECK(summary.sse <= 5e-6);

    double e = 0.0;
    CHECK(sl_eval_data_law(&summary.params, 2e6, &e) == SL_STATUS_OK);
    CHECK(fabs(e - 0.309) <= 3e-3);

    SlDataLawParams published = {0.492415, 0.086236, 0.168059};
    double n = 0.0;
    CHECK(sl_invert_data_law(&published, 0.10, &n) == SL_STATUS_UNREACHABLE);
    CHECK(strstr(sl_last_error_message(), "unreachable below irreducible error") != NULL);

    SlPoints *one = sl_points_new();
    CHECK(sl_points_push(one, 1000.0, 0.4, -1.0) == SL_STATUS_OK);
    SlFit *none = NULL;
    CHECK(sl_fit_data_law(one, NULL, &none) == SL_STATUS_UNDERDETERMINED);
    CHECK(none == NULL);

    sl_fit_free(fit);
    sl_points_free(points);
    sl_points_free(one);
    printf("ok %s\n", sl_version());
    return 0;
}
