/* C interface to the net-load diffusion toolkit.
 *
 * Usage: create a session, load a config file and/or set options, run
 * pipeline commands.  Every command returns 0 on success or a nonzero code
 * from the list below; nd_last_error() describes the most recent failure.
 * Sessions are not thread-safe; use one per thread.
 */
#ifndef NETDIFF_H
#define NETDIFF_H

#ifdef __cplusplus
extern "C" {
#endif

/* Return codes (match the CLI exit codes). */
#define ND_OK 0
#define ND_ERR_PARSE 2    /* malformed input file or value */
#define ND_ERR_CONFIG 3   /* invalid or inconsistent configuration */
#define ND_ERR_NUMERIC 4  /* NaN/Inf or other numeric failure */
#define ND_ERR_IO 5       /* missing, unreadable or unwritable path */
#define ND_ERR_INTERNAL 6 /* precondition violation or unexpected error */

typedef struct nd_session nd_session;

nd_session* nd_session_new(void);
void nd_session_free(nd_session* s);

/* Merges key=value pairs from a config file into the session. */
int nd_load_config_file(nd_session* s, const char* path);
/* Sets one option, overriding any file value; rejects unknown keys. */
int nd_set_option(nd_session* s, const char* key, const char* value);

/* Pipeline commands; artifacts land in the configured out_dir. */
int nd_run_basis(nd_session* s);      /* per-date solar basis CSVs */
int nd_run_synth_data(nd_session* s); /* synthetic dataset CSVs */
int nd_run_train(nd_session* s);      /* checkpoints + loss log */
int nd_run_sample(nd_session* s);     /* trajectories for one condition */
int nd_run_evaluate(nd_session* s);   /* metric report CSVs */
int nd_run_report(nd_session* s);     /* renders report.csv as text */

/* Message for the last failed call on this session ("" if none). */
const char* nd_last_error(const nd_session* s);

const char* nd_version(void);

#ifdef __cplusplus
}
#endif

#endif /* NETDIFF_H */
