/* Indoor optical-wireless channel simulator and WDMA allocator — C API.
 *
 * All objects are opaque handles freed with their matching *_free call.
 * Functions return OWC_OK (0) on success; on failure owc_last_error() gives
 * a thread-local diagnostic for the most recent failing call.
 */
#ifndef OWC_H
#define OWC_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct owc_scenario owc_scenario;
typedef struct owc_channel owc_channel;
typedef struct owc_assignment owc_assignment;

typedef enum {
    OWC_OK = 0,
    OWC_ERR_BADARG = 1,
    OWC_ERR_PARSE = 2,
    OWC_ERR_VALIDATION = 3,
    OWC_ERR_INFEASIBLE = 4,
    OWC_ERR_IO = 5,
    OWC_ERR_INTERNAL = 6
} owc_status;

const char* owc_version(void);
const char* owc_last_error(void);
void owc_string_free(char* s);

/* --- scenarios ---------------------------------------------------------- */

owc_status owc_scenario_load(const char* path, owc_scenario** out);
/* name: "conference_table" | "cocktail1" | "cocktail2" */
owc_status owc_scenario_builtin(const char* name, owc_scenario** out);
void owc_scenario_free(owc_scenario* s);

const char* owc_scenario_name(const owc_scenario* s);
int owc_scenario_user_count(const owc_scenario* s);
int owc_scenario_ap_count(const owc_scenario* s);
int owc_scenario_branch_count(const owc_scenario* s);
int owc_scenario_user_id(const owc_scenario* s, int user_index);
int owc_scenario_ap_id(const owc_scenario* s, int ap_index);
double owc_scenario_rate_bps(const owc_scenario* s);
double owc_scenario_receiver_bandwidth_hz(const owc_scenario* s);
/* 1 if a published reference allocation is attached (built-ins). */
int owc_scenario_has_reference(const owc_scenario* s);
/* Canonical serialized form; free with owc_string_free. */
owc_status owc_scenario_canonical_json(const owc_scenario* s, char** out);

/* --- channel matrix ----------------------------------------------------- */

typedef enum {
    OWC_BW_OPTICAL = 0,
    OWC_BW_ELECTRICAL = 1
} owc_bw_convention;

typedef struct {
    int max_order;         /* 0 = LOS, 1, or 2 */
    double elem1_m;        /* element side for first-order paths */
    double elem2_m;        /* element side for second-order paths */
    double time_bin_s;
    double time_window_s;
    int bw_convention;     /* owc_bw_convention */
    int threads;           /* 0 = hardware concurrency */
} owc_trace_config;

void owc_trace_config_init(owc_trace_config* cfg);

/* 64 hex chars + NUL; covers every input that affects the trace. */
owc_status owc_channel_hash_hex(const owc_scenario* s,
                                const owc_trace_config* cfg, char buf[65]);

/* cache_dir may be NULL (no cache). */
owc_status owc_channel_build(const owc_scenario* s,
                             const owc_trace_config* cfg,
                             const char* cache_dir, owc_channel** out);
void owc_channel_free(owc_channel* ch);

/* bw_3db_hz is +inf when the response never crosses the 3 dB point. */
owc_status owc_channel_link(const owc_channel* ch, int user_index,
                            int branch_index, int ap_index, double* dc_gain,
                            double* bw_3db_hz, double* delay_spread_s);
int owc_channel_window_extended_links(const owc_channel* ch);

/* --- allocation --------------------------------------------------------- */

typedef enum {
    OWC_SOLVER_EXACT = 0,
    OWC_SOLVER_EXHAUSTIVE = 1,
    OWC_SOLVER_GREEDY = 2
} owc_solver_kind;

typedef enum {
    OWC_OBJECTIVE_DB_SUM = 0,
    OWC_OBJECTIVE_LINEAR_SUM = 1
} owc_objective;

typedef struct {
    int solver;     /* owc_solver_kind */
    int objective;  /* owc_objective; negative = scenario default */
    double kappa;   /* bit/s per Hz of usable bandwidth */
} owc_solve_options;

void owc_solve_options_init(owc_solve_options* opts);

owc_status owc_allocate(const owc_scenario* s, const owc_channel* ch,
                        const owc_solve_options* opts, owc_assignment** out);
void owc_assignment_free(owc_assignment* a);

double owc_assignment_objective(const owc_assignment* a);

typedef struct {
    int user_id;
    int ap_id;
    int wavelength;  /* 0=red 1=yellow 2=green 3=blue */
    int branch;      /* zero-based branch index */
    double sinr_db;
    int meets_threshold;
    double rate_bps;
} owc_user_result;

owc_status owc_assignment_user(const owc_assignment* a, int user_index,
                               owc_user_result* out);

const char* owc_wavelength_name(int wavelength);

/* Diff against the scenario's published reference allocation. Any output
 * pointer may be NULL; *report is malloc'd, free with owc_string_free. */
owc_status owc_compare_reference(const owc_scenario* s, const owc_channel* ch,
                                 const owc_assignment* a,
                                 const owc_solve_options* opts, char** report,
                                 double* match_fraction, int* dominates);

#ifdef __cplusplus
}
#endif

#endif /* OWC_H */
