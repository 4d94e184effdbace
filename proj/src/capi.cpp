#include "owc/owc.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "core/allocate.hpp"
#include "core/linkbudget.hpp"
#include "core/metrics.hpp"
#include "core/scene.hpp"

using namespace owc;

struct owc_scenario {
    Scenario s;
};

struct owc_channel {
    ChannelMatrix m;
};

struct owc_assignment {
    Assignment a;
    std::vector<int> user_ids;
    std::vector<int> ap_ids;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
owc_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        set_error(e.what());
        return OWC_ERR_PARSE;
    } catch (const ValidationError& e) {
        set_error(e.what());
        return OWC_ERR_VALIDATION;
    } catch (const ConflictError& e) {
        set_error(e.what());
        return OWC_ERR_VALIDATION;
    } catch (const InfeasibleError& e) {
        set_error(e.what());
        return OWC_ERR_INFEASIBLE;
    } catch (const InstanceTooLargeError& e) {
        set_error(e.what());
        return OWC_ERR_INFEASIBLE;
    } catch (const IoError& e) {
        set_error(e.what());
        return OWC_ERR_IO;
    } catch (const std::exception& e) {
        set_error(e.what());
        return OWC_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown error");
        return OWC_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (p) std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

MatrixBuildOptions to_options(const owc_trace_config* cfg,
                              const char* cache_dir) {
    MatrixBuildOptions o;
    if (cfg) {
        o.bounce.max_order = cfg->max_order;
        o.bounce.elem_size_bounce1 = cfg->elem1_m;
        o.bounce.elem_size_bounce2 = cfg->elem2_m;
        o.bounce.time_bin_s = cfg->time_bin_s;
        o.bounce.time_window_s = cfg->time_window_s;
        o.bw_convention = cfg->bw_convention == OWC_BW_ELECTRICAL
                              ? BwConvention::Electrical
                              : BwConvention::Optical;
        o.threads = cfg->threads;
    }
    if (cache_dir) o.cache_dir = std::string(cache_dir);
    return o;
}

AllocationProblem make_problem(const owc_scenario* s, const owc_channel* ch,
                               const owc_solve_options* opts) {
    AllocationProblem p = AllocationProblem::from_channel(ch->m, s->s);
    if (opts) {
        if (opts->objective == OWC_OBJECTIVE_DB_SUM)
            p.objective = Objective::DbSum;
        else if (opts->objective == OWC_OBJECTIVE_LINEAR_SUM)
            p.objective = Objective::LinearSum;
        if (opts->kappa > 0) p.kappa = opts->kappa;
    }
    return p;
}

}  // namespace

extern "C" {

const char* owc_version(void) { return "0.1.0"; }

const char* owc_last_error(void) { return g_last_error.c_str(); }

void owc_string_free(char* s) { std::free(s); }

owc_status owc_scenario_load(const char* path, owc_scenario** out) {
    if (!path || !out) {
        set_error("null argument");
        return OWC_ERR_BADARG;
    }
    return guarded([&] {
        *out = new owc_scenario{load_scenario(path)};
        return OWC_OK;
    });
}

owc_status owc_scenario_builtin(const char* name, owc_scenario** out) {
    if (!name || !out) {
        set_error("null argument");
        return OWC_ERR_BADARG;
    }
    return guarded([&] {
        *out = new owc_scenario{builtin_scenario(name)};
        return OWC_OK;
    });
}

void owc_scenario_free(owc_scenario* s) { delete s; }

const char* owc_scenario_name(const owc_scenario* s) {
    return s ? s->s.name.c_str() : "";
}

int owc_scenario_user_count(const owc_scenario* s) {
    return s ? s->s.num_users() : 0;
}

int owc_scenario_ap_count(const owc_scenario* s) {
    return s ? s->s.num_aps() : 0;
}

int owc_scenario_branch_count(const owc_scenario* s) {
    return s ? s->s.num_branches() : 0;
}

int owc_scenario_user_id(const owc_scenario* s, int user_index) {
    if (!s || user_index < 0 || user_index >= s->s.num_users()) return -1;
    return s->s.users[size_t(user_index)].id;
}

int owc_scenario_ap_id(const owc_scenario* s, int ap_index) {
    if (!s || ap_index < 0 || ap_index >= s->s.num_aps()) return -1;
    return s->s.units[size_t(ap_index)].id;
}

double owc_scenario_rate_bps(const owc_scenario* s) {
    return s ? s->s.configured_rate_bps : 0.0;
}

double owc_scenario_receiver_bandwidth_hz(const owc_scenario* s) {
    return s ? s->s.noise.receiver_bandwidth_hz : 0.0;
}

int owc_scenario_has_reference(const owc_scenario* s) {
    return s && !s->s.reference.empty() ? 1 : 0;
}

owc_status owc_scenario_canonical_json(const owc_scenario* s, char** out) {
    if (!s || !out) {
        set_error("null argument");
        return OWC_ERR_BADARG;
    }
    return guarded([&] {
        *out = dup_string(canonical_json(s->s));
        return *out ? OWC_OK : OWC_ERR_INTERNAL;
    });
}

void owc_trace_config_init(owc_trace_config* cfg) {
    if (!cfg) return;
    BounceConfig d;
    cfg->max_order = d.max_order;
    cfg->elem1_m = d.elem_size_bounce1;
    cfg->elem2_m = d.elem_size_bounce2;
    cfg->time_bin_s = d.time_bin_s;
    cfg->time_window_s = d.time_window_s;
    cfg->bw_convention = OWC_BW_OPTICAL;
    cfg->threads = 0;
}

owc_status owc_channel_hash_hex(const owc_scenario* s,
                                const owc_trace_config* cfg, char buf[65]) {
    if (!s || !buf) {
        set_error("null argument");
        return OWC_ERR_BADARG;
    }
    return guarded([&] {
        std::string h = channel_hash_hex(s->s, to_options(cfg, nullptr));
        std::memcpy(buf, h.c_str(), 65);
        return OWC_OK;
    });
}

owc_status owc_channel_build(const owc_scenario* s,
                             const owc_trace_config* cfg,
                             const char* cache_dir, owc_channel** out) {
    if (!s || !out) {
        set_error("null argument");
        return OWC_ERR_BADARG;
    }
    return guarded([&] {
        *out = new owc_channel{
            build_channel_matrix(s->s, to_options(cfg, cache_dir))};
        return OWC_OK;
    });
}

void owc_channel_free(owc_channel* ch) { delete ch; }

owc_status owc_channel_link(const owc_channel* ch, int user_index,
                            int branch_index, int ap_index, double* dc_gain,
                            double* bw_3db_hz, double* delay_spread_s) {
    if (!ch) {
        set_error("null argument");
        return OWC_ERR_BADARG;
    }
    if (user_index < 0 || user_index >= ch->m.num_users || branch_index < 0 ||
        branch_index >= ch->m.num_branches || ap_index < 0 ||
        ap_index >= ch->m.num_aps) {
        set_error("link index out of range");
        return OWC_ERR_BADARG;
    }
    const LinkMetrics& lm = ch->m.at(user_index, branch_index, ap_index);
    if (dc_gain) *dc_gain = lm.dc_gain;
    if (bw_3db_hz) *bw_3db_hz = lm.bw_3db_hz;
    if (delay_spread_s) *delay_spread_s = lm.delay_spread_s;
    return OWC_OK;
}

int owc_channel_window_extended_links(const owc_channel* ch) {
    return ch ? ch->m.window_extended_links : 0;
}

void owc_solve_options_init(owc_solve_options* opts) {
    if (!opts) return;
    opts->solver = OWC_SOLVER_EXACT;
    opts->objective = -1;  // scenario default
    opts->kappa = kDefaultKappa;
}

owc_status owc_allocate(const owc_scenario* s, const owc_channel* ch,
                        const owc_solve_options* opts, owc_assignment** out) {
    if (!s || !ch || !out) {
        set_error("null argument");
        return OWC_ERR_BADARG;
    }
    return guarded([&] {
        AllocationProblem p = make_problem(s, ch, opts);
        Assignment a;
        int solver = opts ? opts->solver : OWC_SOLVER_EXACT;
        switch (solver) {
            case OWC_SOLVER_EXHAUSTIVE: a = solve_exhaustive(p); break;
            case OWC_SOLVER_GREEDY: a = solve_greedy(p); break;
            default: a = solve_exact(p); break;
        }
        *out = new owc_assignment{std::move(a), p.user_ids, p.ap_ids};
        return OWC_OK;
    });
}

void owc_assignment_free(owc_assignment* a) { delete a; }

double owc_assignment_objective(const owc_assignment* a) {
    return a ? a->a.objective_value : 0.0;
}

owc_status owc_assignment_user(const owc_assignment* a, int user_index,
                               owc_user_result* out) {
    if (!a || !out || user_index < 0 ||
        user_index >= int(a->a.users.size())) {
        set_error("bad assignment user index");
        return OWC_ERR_BADARG;
    }
    const UserAssignment& ua = a->a.users[size_t(user_index)];
    out->user_id = a->user_ids[size_t(user_index)];
    out->ap_id = a->ap_ids[size_t(ua.ap)];
    out->wavelength = ua.w;
    out->branch = ua.branch;
    out->sinr_db = ua.sinr_db;
    out->meets_threshold = ua.meets_threshold ? 1 : 0;
    out->rate_bps = ua.rate_bps;
    return OWC_OK;
}

const char* owc_wavelength_name(int wavelength) {
    if (wavelength < 0 || wavelength >= kNumWavelengths) return "?";
    return wavelength_name(static_cast<Wavelength>(wavelength));
}

owc_status owc_compare_reference(const owc_scenario* s, const owc_channel* ch,
                                 const owc_assignment* a,
                                 const owc_solve_options* opts, char** report,
                                 double* match_fraction, int* dominates) {
    if (!s || !ch || !a) {
        set_error("null argument");
        return OWC_ERR_BADARG;
    }
    if (s->s.reference.empty()) {
        set_error("scenario has no reference allocation");
        return OWC_ERR_BADARG;
    }
    return guarded([&] {
        AllocationProblem p = make_problem(s, ch, opts);
        CompareReport rep = compare_to_reference(p, a->a, s->s.reference);
        if (report) *report = dup_string(rep.text);
        if (match_fraction) *match_fraction = rep.match_fraction;
        if (dominates) *dominates = rep.dominates ? 1 : 0;
        return OWC_OK;
    });
}

}  // extern "C"
