#include <math.h>
#include <stdio.h>
#include "tbdag.h"

int main(void) {
    TbGame *game = NULL;
    if (tb_game_from_preset("fig2", &game) != TB_STATUS_OK) {
        char *msg = tb_last_error_message();
        fprintf(stderr, "load failed: %s\n", msg);
        tb_string_free(msg);
        return 1;
    }
    TbSolveConfig cfg = tb_solve_config_default();
    cfg.eps = 1e-3;
    TbSolveResult *res = NULL;
    if (tb_solve(game, &cfg, &res) != TB_STATUS_OK) {
        tb_game_free(game);
        return 1;
    }
    double value = tb_result_value(res);
    printf("value %.6f gap %.3e iters %llu\n", value, tb_result_gap(res),
           (unsigned long long)tb_result_iterations(res));
    TbGame *none = NULL;
    int budget_ok = tb_game_from_preset("bogus", &none) == TB_STATUS_INVALID_PARAMS;
    tb_result_free(res);
    tb_game_free(game);
    return (fabs(value) <= 1e-3 && budget_ok) ? 0 : 1;
}
