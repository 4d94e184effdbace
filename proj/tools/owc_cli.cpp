// Command-line front end for the owc shared library: runs scenarios end to
// end and emits per-user metric tables as CSV plus a machine-readable run
// manifest.
#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "owc/owc.h"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitInternal = 3;

int exit_code_for(owc_status st) {
    switch (st) {
        case OWC_OK: return kExitOk;
        case OWC_ERR_BADARG:
        case OWC_ERR_PARSE:
        case OWC_ERR_VALIDATION: return kExitValidation;
        case OWC_ERR_INFEASIBLE: return kExitInfeasible;
        default: return kExitInternal;
    }
}

[[noreturn]] void die(owc_status st, const std::string& context) {
    std::fprintf(stderr, "error: %s: %s\n", context.c_str(), owc_last_error());
    std::exit(exit_code_for(st));
}

// Shortest round-trip decimal, locale-independent.
std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

struct Options {
    std::string scenario = "conference_table";
    std::string resolution = "desk";
    int bounces = 2;
    std::string objective;  // empty = scenario default
    std::string solver = "exact";
    std::string out = "out";
    std::string cache_dir;
    std::string bw_convention = "optical";
    double kappa = 1.42;
    int threads = 0;
};

owc_scenario* open_scenario(const Options& opt) {
    owc_scenario* s = nullptr;
    owc_status st;
    if (fs::exists(opt.scenario) && !fs::is_directory(opt.scenario))
        st = owc_scenario_load(opt.scenario.c_str(), &s);
    else
        st = owc_scenario_builtin(opt.scenario.c_str(), &s);
    if (st != OWC_OK) die(st, "loading scenario '" + opt.scenario + "'");
    return s;
}

owc_trace_config trace_config(const Options& opt) {
    owc_trace_config cfg;
    owc_trace_config_init(&cfg);
    cfg.max_order = opt.bounces;
    if (opt.resolution == "desk") {
        cfg.elem1_m = 0.20;
        cfg.elem2_m = 0.80;
    } else if (opt.resolution != "paper") {
        std::fprintf(stderr, "error: --resolution must be paper|desk\n");
        std::exit(kExitValidation);
    }
    cfg.bw_convention = opt.bw_convention == "electrical" ? OWC_BW_ELECTRICAL
                                                          : OWC_BW_OPTICAL;
    cfg.threads = opt.threads;
    return cfg;
}

owc_solve_options solve_options(const Options& opt) {
    owc_solve_options so;
    owc_solve_options_init(&so);
    if (opt.solver == "exhaustive") so.solver = OWC_SOLVER_EXHAUSTIVE;
    else if (opt.solver == "greedy") so.solver = OWC_SOLVER_GREEDY;
    else so.solver = OWC_SOLVER_EXACT;
    if (opt.objective == "db") so.objective = OWC_OBJECTIVE_DB_SUM;
    else if (opt.objective == "linear") so.objective = OWC_OBJECTIVE_LINEAR_SUM;
    so.kappa = opt.kappa;
    return so;
}

std::string effective_cache_dir(const Options& opt) {
    if (!opt.cache_dir.empty()) return opt.cache_dir;
    if (const char* env = std::getenv("OWC_CACHE_DIR")) return env;
    return {};
}

// One CLI invocation per output directory.
int lock_out_dir(const fs::path& dir) {
    fs::create_directories(dir);
    int fd = ::open((dir / ".lock").c_str(), O_RDWR | O_CREAT, 0644);
    if (fd < 0 || ::flock(fd, LOCK_EX | LOCK_NB) != 0) {
        std::fprintf(stderr,
                     "error: output directory %s is in use by another run\n",
                     dir.c_str());
        std::exit(kExitValidation);
    }
    return fd;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) {
        std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
        std::exit(kExitInternal);
    }
}

struct StageTimer {
    std::map<std::string, double> seconds;
    template <typename Fn>
    auto time(const std::string& stage, Fn&& fn) {
        auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            seconds[stage] =
                std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start).count();
        } else {
            auto r = fn();
            seconds[stage] =
                std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start).count();
            return r;
        }
    }
};

void write_manifest(const fs::path& dir, const owc_scenario* s,
                    const Options& opt, const owc_trace_config& cfg,
                    const StageTimer& timer) {
    char hash[65] = {};
    if (owc_status st = owc_channel_hash_hex(s, &cfg, hash); st != OWC_OK)
        die(st, "hashing scenario");
    ordered_json j;
    j["tool_version"] = owc_version();
    j["scenario"] = opt.scenario;
    j["scenario_hash"] = hash;
    j["trace"] = {{"max_order", cfg.max_order},
                  {"elem1_m", cfg.elem1_m},
                  {"elem2_m", cfg.elem2_m},
                  {"time_bin_s", cfg.time_bin_s},
                  {"time_window_s", cfg.time_window_s},
                  {"bw_convention", opt.bw_convention},
                  {"threads", cfg.threads}};
    j["solver"] = {{"kind", opt.solver},
                   {"objective", opt.objective.empty() ? "scenario-default"
                                                       : opt.objective},
                   {"kappa", opt.kappa}};
    ordered_json t = ordered_json::object();
    for (const auto& [k, v] : timer.seconds) t[k] = v;
    j["timings_s"] = t;
    write_file(dir / "manifest.json", j.dump(2) + "\n");
}

owc_channel* build_channel(const owc_scenario* s, const Options& opt,
                           const owc_trace_config& cfg) {
    std::string cache = effective_cache_dir(opt);
    owc_channel* ch = nullptr;
    owc_status st = owc_channel_build(s, &cfg,
                                      cache.empty() ? nullptr : cache.c_str(),
                                      &ch);
    if (st != OWC_OK) die(st, "tracing channel matrix");
    if (int n = owc_channel_window_extended_links(ch); n > 0)
        std::fprintf(stderr,
                     "warning: time window extended on %d link(s)\n", n);
    return ch;
}

std::string channel_csv(const owc_scenario* s, const owc_channel* ch) {
    std::string csv = "user,branch,ap,dc_gain,bw_3db_hz,delay_spread_s\n";
    int users = owc_scenario_user_count(s);
    int branches = owc_scenario_branch_count(s);
    int aps = owc_scenario_ap_count(s);
    for (int u = 0; u < users; ++u) {
        for (int b = 0; b < branches; ++b) {
            for (int a = 0; a < aps; ++a) {
                double dc, bw, ds;
                owc_channel_link(ch, u, b, a, &dc, &bw, &ds);
                csv += std::to_string(owc_scenario_user_id(s, u)) + "," +
                       std::to_string(b + 1) + "," +
                       std::to_string(owc_scenario_ap_id(s, a)) + "," +
                       fmt(dc) + "," + fmt(bw) + "," + fmt(ds) + "\n";
            }
        }
    }
    return csv;
}

int cmd_simulate(const Options& opt) {
    fs::path dir(opt.out);
    int lock_fd = lock_out_dir(dir);
    owc_scenario* s = open_scenario(opt);
    owc_trace_config cfg = trace_config(opt);
    StageTimer timer;
    owc_channel* ch =
        timer.time("trace", [&] { return build_channel(s, opt, cfg); });
    std::string csv =
        timer.time("report", [&] { return channel_csv(s, ch); });
    write_file(dir / "channel.csv", csv);
    write_manifest(dir, s, opt, cfg, timer);
    owc_channel_free(ch);
    owc_scenario_free(s);
    ::close(lock_fd);
    return kExitOk;
}

int cmd_allocate(const Options& opt) {
    fs::path dir(opt.out);
    int lock_fd = lock_out_dir(dir);
    owc_scenario* s = open_scenario(opt);
    owc_trace_config cfg = trace_config(opt);
    owc_solve_options so = solve_options(opt);
    StageTimer timer;
    owc_channel* ch =
        timer.time("trace", [&] { return build_channel(s, opt, cfg); });
    owc_assignment* a = timer.time("solve", [&] {
        owc_assignment* out = nullptr;
        if (owc_status st = owc_allocate(s, ch, &so, &out); st != OWC_OK)
            die(st, "solving allocation");
        return out;
    });

    std::string csv =
        "user,ap,wavelength,branch,sinr_db,meets_threshold,"
        "supported_rate_bps\n";
    for (int u = 0; u < owc_scenario_user_count(s); ++u) {
        owc_user_result r;
        owc_assignment_user(a, u, &r);
        csv += std::to_string(r.user_id) + "," + std::to_string(r.ap_id) +
               "," + owc_wavelength_name(r.wavelength) + "," +
               std::to_string(r.branch + 1) + "," + fmt(r.sinr_db) + "," +
               (r.meets_threshold ? "true" : "false") + "," +
               fmt(r.rate_bps) + "\n";
    }
    write_file(dir / "allocation.csv", csv);
    std::printf("objective: %s\n", fmt(owc_assignment_objective(a)).c_str());

    if (owc_scenario_has_reference(s)) {
        char* report = nullptr;
        if (owc_status st = owc_compare_reference(s, ch, a, &so, &report,
                                                  nullptr, nullptr);
            st != OWC_OK)
            die(st, "comparing against the published allocation");
        write_file(dir / "vs_table2.txt", report);
        owc_string_free(report);
    }

    write_manifest(dir, s, opt, cfg, timer);
    owc_assignment_free(a);
    owc_channel_free(ch);
    owc_scenario_free(s);
    ::close(lock_fd);
    return kExitOk;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        std::fprintf(stderr, "error: missing input %s\n", path.c_str());
        std::exit(kExitValidation);
    }
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(cell);
        rows.push_back(std::move(row));
    }
    return rows;
}

int cmd_report(const Options& opt) {
    fs::path dir(opt.out);
    for (const char* f : {"channel.csv", "allocation.csv"}) {
        if (!fs::exists(dir / f)) {
            std::fprintf(stderr,
                         "error: missing input %s (run simulate and allocate "
                         "into this directory first)\n",
                         (dir / f).c_str());
            return kExitValidation;
        }
    }
    auto channel = read_csv(dir / "channel.csv");
    auto alloc = read_csv(dir / "allocation.csv");

    // (user, branch, ap) -> bandwidth
    std::map<std::tuple<std::string, std::string, std::string>, std::string> bw;
    for (size_t i = 1; i < channel.size(); ++i)
        bw[{channel[i][0], channel[i][1], channel[i][2]}] = channel[i][4];

    std::string fig3 = "user,bw_3db_hz\n";
    std::string fig4 = "user,sinr_db\n";
    std::string fig5 = "user,rate_bps\n";
    for (size_t i = 1; i < alloc.size(); ++i) {
        const auto& row = alloc[i];
        auto it = bw.find({row[0], row[3], row[1]});
        fig3 += row[0] + "," + (it != bw.end() ? it->second : "nan") + "\n";
        fig4 += row[0] + "," + row[4] + "\n";
        fig5 += row[0] + "," + row[6] + "\n";
    }
    write_file(dir / "fig3_bandwidth.csv", fig3);
    write_file(dir / "fig4_sinr.csv", fig4);
    write_file(dir / "fig5_rate.csv", fig5);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Indoor optical-wireless channel simulator and WDMA "
                 "resource allocator"};
    app.require_subcommand(1);

    Options opt;
    auto add_shared = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", opt.scenario,
                        "built-in name (conference_table|cocktail1|cocktail2) "
                        "or scenario file path");
        cmd->add_option("--resolution", opt.resolution,
                        "paper (5/20 cm elements) or desk (20/80 cm)")
            ->check(CLI::IsMember({"paper", "desk"}));
        cmd->add_option("--bounces", opt.bounces, "reflection orders (0-2)")
            ->check(CLI::Range(0, 2));
        cmd->add_option("--objective", opt.objective, "db or linear")
            ->check(CLI::IsMember({"db", "linear"}));
        cmd->add_option("--solver", opt.solver, "exact|exhaustive|greedy")
            ->check(CLI::IsMember({"exact", "exhaustive", "greedy"}));
        cmd->add_option("--out", opt.out, "output directory");
        cmd->add_option("--cache-dir", opt.cache_dir,
                        "channel cache directory (or $OWC_CACHE_DIR)");
        cmd->add_option("--bw-convention", opt.bw_convention,
                        "optical or electrical 3 dB definition")
            ->check(CLI::IsMember({"optical", "electrical"}));
        cmd->add_option("--kappa", opt.kappa,
                        "supported rate per Hz of usable bandwidth");
        cmd->add_option("--threads", opt.threads,
                        "trace worker threads (0 = all cores)");
    };

    CLI::App* sim = app.add_subcommand(
        "simulate", "trace the channel matrix and write channel.csv");
    add_shared(sim);
    CLI::App* alloc = app.add_subcommand(
        "allocate", "solve the AP/wavelength assignment and write "
                    "allocation.csv");
    add_shared(alloc);
    CLI::App* rep = app.add_subcommand(
        "report", "derive per-user figure data from a prior run directory");
    add_shared(rep);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(opt);
        if (alloc->parsed()) return cmd_allocate(opt);
        return cmd_report(opt);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInternal;
    }
}
