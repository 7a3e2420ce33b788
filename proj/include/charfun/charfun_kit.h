#ifndef CHARFUN_KIT_H
#define CHARFUN_KIT_H

/* C interface to the characteristic-function toolkit. All analysis entry
 * points take an opaque tuple handle and return a JSON report string that the
 * caller frees with cfk_string_free. Status codes double as process exit
 * codes: 0 ok, 1 math-level failure, 2 input error, 3 budget exceeded. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  CFK_OK = 0,
  CFK_MATH = 1,
  CFK_PARSE = 2,
  CFK_BUDGET = 3
} cfk_status;

typedef struct cfk_tuple cfk_tuple;

/* Message for the most recent failure on this thread; empty string if none. */
const char* cfk_last_error(void);

cfk_status cfk_tuple_parse(const char* json_text, cfk_tuple** out);
cfk_status cfk_tuple_builtin(const char* name, cfk_tuple** out);
cfk_status cfk_tuple_to_json(const cfk_tuple* tuple, char** out_json);
void cfk_tuple_free(cfk_tuple* tuple);
void cfk_string_free(char* s);

/* Coisometry / contraction verdicts. */
cfk_status cfk_validate(const cfk_tuple* tuple, double tol, char** out_json);

/* Invariant state, block decomposition, ergodicity and decay tables. */
cfk_status cfk_analyze(const cfk_tuple* tuple, double tol, char** out_json);

/* Extended characteristic function; popescu != 0 adds the *-stable-corner
 * symbol, the gamma isometry and the restriction-identity residuals. */
cfk_status cfk_charfun(const cfk_tuple* tuple, int depth, double tol, int popescu,
                       char** out_json);

/* Symbol equivalence vs unitary intertwiner; tuples with different
 * eigenvalue tuples are compared after a mixing alignment. */
cfk_status cfk_compare(const cfk_tuple* a, const cfk_tuple* b, int depth, double tol,
                       char** out_json);

/* Truncated dilation identities: compression, Cuntz state, intertwining. */
cfk_status cfk_dilation_check(const cfk_tuple* tuple, int depth, double tol,
                              char** out_json);

/* Coupling-iteration oracle vs the closed-form coefficients. */
cfk_status cfk_coupling_check(const cfk_tuple* tuple, int steps, double tol,
                              char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* CHARFUN_KIT_H */
