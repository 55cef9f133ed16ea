// Copyright 2026 The proxtrace Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "proxtrace_cli/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "proxtrace/ann/index_io.hpp"
#include "proxtrace/dataset_io.hpp"
#include "proxtrace/encoder.hpp"
#include "proxtrace/error.hpp"
#include "proxtrace/pipeline.hpp"
#include "proxtrace/trajectory.hpp"

namespace proxtrace::cli {

namespace fs = std::filesystem;

namespace {

/// Raised for problems the parser cannot see (flag combinations, inputs).
struct CliError {
    int code;
    std::string kind;
    std::string message;
};

[[noreturn]] void
usage_error(const std::string& message) {
    throw CliError{kUsage, "usage", message};
}

fs::path
output_path(const std::string& path) {
    fs::path p(path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv(kOutDirEnv); dir && *dir) {
            return fs::path(dir) / p;
        }
    }
    return p;
}

void
require_file(const fs::path& path, const std::string& what) {
    if (!fs::is_regular_file(path)) {
        throw CliError{kMissingInput, "missing-input", what + " not found: " + path.string()};
    }
}

DatasetFiles
input_dataset(const std::string& prefix) {
    auto files = DatasetFiles::from_prefix(prefix);
    require_file(files.points, "points file");
    return files;
}

void
ensure_parent(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
}

struct Context {
    CLI::App* app = nullptr;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;

    /// Writes "<file>.config.ini" holding every option of this invocation.
    void
    sidecar(const fs::path& file) const {
        const fs::path side = file.string() + ".config.ini";
        ensure_parent(side);
        std::ofstream s(side, std::ios::trunc);
        s << "# Rerun with: proxtrace --config " << side.filename().string() << '\n';
        // Only options given on this run are set; the rest are listed with
        // their defaults as comments so the replay sees the same flags.
        for (const auto* sub : app->get_subcommands()) {
            s << '[' << sub->get_name() << "]\n";
            for (const auto* opt : sub->get_options()) {
                const auto name = opt->get_single_name();
                if (name.empty() || name == "help") {
                    continue;
                }
                if (opt->count() == 0) {
                    const auto fallback = opt->get_expected_min() == 0 ? "false" : opt->get_default_str();
                    s << "# " << name << '=' << fallback << '\n';
                    continue;
                }
                const auto& given = opt->results();
                if (given.size() == 1) {
                    s << name << "=\"" << given.front() << "\"\n";
                } else {
                    s << name << "=[";
                    for (std::size_t i = 0; i < given.size(); ++i) {
                        s << (i ? "," : "") << '"' << given[i] << '"';
                    }
                    s << "]\n";
                }
            }
        }
        if (!s) {
            throw Error(ErrorKind::io, "cannot write " + side.string());
        }
    }
};

// ---- generate-walks -------------------------------------------------------

struct WalkArgs {
    WalkConfig cfg;
    std::string boundary = "clamp";
    std::string out;
};

void
add_generate_walks(CLI::App& app, WalkArgs& a) {
    auto* sub = app.add_subcommand("generate-walks", "Random-walk trajectories with contact ground truth");
    sub->configurable();
    sub->add_option("--users", a.cfg.n_agents, "Number of agents")->capture_default_str();
    sub->add_option("--box", a.cfg.box_edge, "Edge of the spatial cube (space units)")->capture_default_str();
    sub->add_option("--tau-min", a.cfg.tau_min, "Minimum steps per agent")->capture_default_str();
    sub->add_option("--tau-max", a.cfg.tau_max, "Maximum steps per agent")->capture_default_str();
    sub->add_option("--epsilon", a.cfg.contact_epsilon, "Contact radius at a shared timestep (space units)")
        ->capture_default_str();
    sub->add_option("--time-scale", a.cfg.time_scale, "Space units per timestep on the time axis")
        ->capture_default_str();
    sub->add_option("--boundary", a.boundary, "Wall behaviour")
        ->check(CLI::IsMember({"clamp", "reflect"}))
        ->capture_default_str();
    sub->add_option("--seed", a.cfg.seed, "PRNG seed")->capture_default_str();
    sub->add_option("--out", a.out, "Output prefix; writes <out>.points.csv and <out>.truth.csv")->required();
}

int
run_generate_walks(WalkArgs& a, const Context& ctx) {
    a.cfg.boundary = a.boundary == "reflect" ? Boundary::reflect : Boundary::clamp;
    a.cfg.validate();
    const auto files = DatasetFiles::from_prefix(output_path(a.out));
    const auto ds = generate_walks(a.cfg);
    save_dataset(ds, files);
    ctx.sidecar(files.points);
    *ctx.out << "wrote " << files.points.string() << " (" << ds.records.size() << " users, "
             << ds.instance_count() << " points, " << ds.truth.entries().size() << " users with contacts)\n";
    return kOk;
}

// ---- generate-checkins ----------------------------------------------------

struct CheckinArgs {
    GhostConfig cfg;
    std::string out;
};

void
add_generate_checkins(CLI::App& app, CheckinArgs& a) {
    auto* sub = app.add_subcommand("generate-checkins", "Check-ins with inner and outer ghost users");
    sub->configurable();
    sub->add_option("--users", a.cfg.n_real_users, "Number of real users")->capture_default_str();
    sub->add_option("--inner-count", a.cfg.inner_count, "Ghosts inside the inner radius per user")
        ->capture_default_str();
    sub->add_option("--outer-count", a.cfg.outer_count, "Ghosts in the outer annulus per user")
        ->capture_default_str();
    sub->add_option("--inner-radius", a.cfg.inner_radius, "Inner radius (space-time units)")->capture_default_str();
    sub->add_option("--outer-radius", a.cfg.outer_radius, "Outer radius (space-time units)")->capture_default_str();
    sub->add_option("--extent", a.cfg.extent, "Edge of the spatial cube (space units)")->capture_default_str();
    sub->add_option("--time-slots", a.cfg.time_slots, "Distinct check-in times; 0 gives one per user")
        ->capture_default_str();
    sub->add_option("--seed", a.cfg.seed, "PRNG seed")->capture_default_str();
    sub->add_option("--out", a.out, "Output prefix; writes <out>.points.csv and <out>.truth.csv")->required();
}

int
run_generate_checkins(CheckinArgs& a, const Context& ctx) {
    a.cfg.validate();
    const auto files = DatasetFiles::from_prefix(output_path(a.out));
    const auto ds = generate_checkins(a.cfg);
    save_dataset(ds, files);
    ctx.sidecar(files.points);
    *ctx.out << "wrote " << files.points.string() << " (" << a.cfg.n_real_users << " real users, "
             << ds.records.size() - a.cfg.n_real_users << " ghosts)\n";
    return kOk;
}

// ---- fit-encoder -----------------------------------------------------------

struct FitArgs {
    std::string data;
    EncodingParams enc;
    std::string out;
};

void
add_fit_encoder(CLI::App& app, FitArgs& a) {
    auto* sub = app.add_subcommand("fit-encoder", "Fit a projection basis and quantization grid");
    sub->configurable();
    sub->add_option("--data", a.data, "Dataset prefix")->required();
    sub->add_option("--p", a.enc.p, "Number of projection vectors")->capture_default_str();
    sub->add_option("--M", a.enc.intervals, "Quantization intervals per projected axis")->capture_default_str();
    sub->add_option("--seed", a.enc.seed, "Basis PRNG seed")->capture_default_str();
    sub->add_option("--out", a.out, "Encoder output file")->required();
}

int
run_fit_encoder(FitArgs& a, const Context& ctx) {
    if (a.enc.p < 1 || a.enc.intervals < 1) {
        usage_error("--p and --M must be positive");
    }
    const auto files = input_dataset(a.data);
    const auto out = output_path(a.out);
    const auto ds = load_dataset(files);
    const auto points = ds.all_points();
    const auto model = EncodingModel::fit(points, a.enc.p, a.enc.intervals, a.enc.seed);
    ensure_parent(out);
    model.save(out);
    ctx.sidecar(out);
    *ctx.out << "wrote " << out.string() << " (p=" << a.enc.p << ", M=" << a.enc.intervals
             << ", delta=" << model.grid().delta() << ")\n";
    return kOk;
}

// ---- shared index / experiment flags ---------------------------------------

struct IndexFlags {
    std::string backend = "kd";
    ann::HnswParams hnsw;
    ann::KdOptions kd;
    CLI::Option* backend_opt = nullptr;
    CLI::Option* max_neighbors = nullptr;
    CLI::Option* ef_construction = nullptr;
    CLI::Option* ef_search = nullptr;
    CLI::Option* level_mult = nullptr;
    CLI::Option* hnsw_seed = nullptr;
    CLI::Option* max_visits = nullptr;

    void
    add(CLI::App* sub) {
        backend_opt = sub->add_option("--backend", backend, "Index backend")
                          ->check(CLI::IsMember({"brute", "kd", "hnsw"}))
                          ->capture_default_str();
        max_neighbors = sub->add_option("--max-neighbors", hnsw.max_neighbors, "HNSW links per node")
                            ->capture_default_str();
        ef_construction = sub->add_option("--ef-construction", hnsw.ef_construction, "HNSW build candidate pool")
                              ->capture_default_str();
        ef_search = sub->add_option("--ef-search", hnsw.ef_search, "HNSW search candidate pool (raised to r)")
                        ->capture_default_str();
        level_mult = sub->add_option("--level-mult", hnsw.level_mult, "HNSW level factor; 0 means 1/ln(max-neighbors)")
                         ->capture_default_str();
        hnsw_seed = sub->add_option("--hnsw-seed", hnsw.seed, "HNSW level PRNG seed")->capture_default_str();
        max_visits = sub->add_option("--kd-max-visits", kd.max_visits, "KD-tree node budget per query; 0 is exact")
                         ->capture_default_str();
    }

    /// Rejects tuning flags that the chosen backend would ignore.
    void
    check(std::string_view chosen) const {
        if (chosen != "hnsw") {
            for (const auto* opt : {max_neighbors, ef_construction, ef_search, level_mult, hnsw_seed}) {
                if (opt->count() > 0) {
                    usage_error(opt->get_name() + " only applies to --backend hnsw");
                }
            }
        }
        if (chosen != "kd" && max_visits->count() > 0) {
            usage_error("--kd-max-visits only applies to --backend kd");
        }
    }
};

// ---- build-index -----------------------------------------------------------

struct BuildArgs {
    std::string data;
    std::string encoder;
    IndexFlags index;
    std::string out;
};

void
add_build_index(CLI::App& app, BuildArgs& a) {
    auto* sub = app.add_subcommand("build-index", "Build and save a nearest-neighbour index");
    sub->configurable();
    sub->add_option("--data", a.data, "Dataset prefix")->required();
    sub->add_option("--encoder", a.encoder, "Encoder file; index encoded points instead of raw ones");
    a.index.add(sub);
    sub->add_option("--out", a.out, "Index output file")->required();
}

int
run_build_index(BuildArgs& a, const Context& ctx) {
    a.index.check(a.index.backend);
    a.index.hnsw.validate();
    const auto files = input_dataset(a.data);
    if (!a.encoder.empty()) {
        require_file(a.encoder, "encoder file");
    }
    const auto out = output_path(a.out);
    const auto ds = load_dataset(files);
    std::optional<EncodingModel> encoder;
    if (!a.encoder.empty()) {
        encoder = EncodingModel::load(a.encoder);
    }
    auto index = build_index(
        make_item_store(ds, encoder ? &*encoder : nullptr), ann::parse_backend(a.index.backend), a.index.hnsw, a.index.kd);
    ensure_parent(out);
    ann::save_index(*index, out);
    ctx.sidecar(out);
    *ctx.out << "wrote " << out.string() << " (" << a.index.backend << ", " << index->size() << " items, "
             << ann::to_string(index->representation()) << ")\n";
    return kOk;
}

// ---- evaluate / sweep --------------------------------------------------------

struct ExperimentArgs {
    std::string data;
    std::string label;
    std::string index_file;
    std::string encoder;
    IndexFlags index;
    bool encoded = false;
    EncodingParams enc;
    CLI::Option* encoded_opt = nullptr;
    CLI::Option* encoding_p = nullptr;
    CLI::Option* encoding_m = nullptr;
    CLI::Option* encoding_seed = nullptr;
    CLI::Option* index_opt = nullptr;
    CLI::Option* encoder_opt = nullptr;
    std::size_t r = 100;
    std::size_t k_final = 0;
    double infected_fraction = 0.01;
    std::uint64_t query_seed = 42;
    bool all_users = false;
    bool exhaustive = false;
    std::size_t exhaustive_queries = 200;
    std::size_t threads = 1;
    std::string csv;

    void
    add(CLI::App* sub) {
        sub->add_option("--data", data, "Dataset prefix")->required();
        sub->add_option("--label", label, "Dataset name in result tables (default: prefix file name)");
        index_opt = sub->add_option("--index", index_file, "Prebuilt index file instead of building one");
        encoder_opt = sub->add_option("--encoder", encoder, "Encoder file used for queries (and for building)");
        index.add(sub);
        encoded_opt = sub->add_flag("--encoded", encoded, "Index encoded points with p=16, M=128 unless overridden");
        encoding_p = sub->add_option("--encoding-p", enc.p, "Projection vectors of a freshly fitted encoder")
                         ->capture_default_str();
        encoding_m = sub->add_option("--encoding-m", enc.intervals, "Quantization intervals of a fresh encoder")
                         ->capture_default_str();
        encoding_seed = sub->add_option("--encoding-seed", enc.seed, "Basis PRNG seed of a fresh encoder")
                            ->capture_default_str();
        encoding_p->needs(encoding_m);
        encoding_m->needs(encoding_p);
        encoding_p->excludes(encoder_opt);
        encoding_m->excludes(encoder_opt);
        encoded_opt->excludes(encoder_opt);
        sub->add_option("--r", r, "Neighbours retrieved per infected sample")->capture_default_str();
        sub->add_option("--k-final", k_final, "Keep only the k closest users after the union; 0 keeps all")
            ->capture_default_str();
        sub->add_option("--infected-fraction", infected_fraction, "Fraction of real users queried, in (0, 1]")
            ->capture_default_str();
        sub->add_option("--query-seed", query_seed, "PRNG seed for choosing infected users")->capture_default_str();
        sub->add_flag("--all-users", all_users, "Sample infected users without preferring ones with contacts");
        sub->add_flag("--exhaustive", exhaustive, "Also time brute-force search for a speed-up ratio");
        sub->add_option("--exhaustive-queries", exhaustive_queries, "Queries timed exhaustively; 0 uses all")
            ->capture_default_str();
        sub->add_option("--threads", threads, "Query worker threads")->capture_default_str();
        sub->add_option("--csv", csv, "Tidy results file (one row per config and metric)");
    }

    ExperimentConfig
    config() const {
        ExperimentConfig cfg;
        cfg.dataset_label = label.empty() ? fs::path(data).filename().string() : label;
        cfg.backend = ann::parse_backend(index.backend);
        if (encoded || encoding_p->count() > 0) {
            cfg.encoding = enc;
        }
        cfg.infected_fraction = infected_fraction;
        cfg.r = r;
        if (k_final > 0) {
            cfg.k_final = k_final;
        }
        cfg.query_seed = query_seed;
        cfg.evaluable_only = !all_users;
        cfg.hnsw = index.hnsw;
        cfg.kd = index.kd;
        cfg.measure_exhaustive = exhaustive;
        cfg.exhaustive_queries = exhaustive_queries;
        cfg.threads = threads;
        return cfg;
    }

    void
    check() const {
        if (index_opt->count() > 0) {
            for (const auto* opt : {index.backend_opt,
                                    index.max_neighbors,
                                    index.ef_construction,
                                    index.level_mult,
                                    index.hnsw_seed,
                                    encoded_opt,
                                    encoding_p,
                                    encoding_seed}) {
                if (opt->count() > 0) {
                    usage_error(opt->get_name() + " cannot be combined with --index");
                }
            }
        } else {
            index.check(index.backend);
        }
        if (encoding_seed->count() > 0 && encoding_p->count() == 0 && !encoded) {
            usage_error("--encoding-seed needs --encoded or --encoding-p/--encoding-m");
        }
        config().validate();
    }
};

struct Loaded {
    Dataset dataset;
    PreparedIndex prepared;
    bool prebuilt = false;
};

/// Loads every input before anything is timed.
Loaded
load_inputs(const ExperimentArgs& a, ExperimentConfig& cfg, bool build) {
    const auto files = input_dataset(a.data);
    require_file(files.truth, "ground-truth file");
    if (!a.index_file.empty()) {
        require_file(a.index_file, "index file");
    }
    if (!a.encoder.empty()) {
        require_file(a.encoder, "encoder file");
    }
    Loaded in;
    in.dataset = load_dataset(files);
    if (!a.encoder.empty()) {
        in.prepared.encoder = EncodingModel::load(a.encoder);
        cfg.encoding = EncodingParams{in.prepared.encoder->output_dim(),
                                      in.prepared.encoder->grid().intervals(),
                                      in.prepared.encoder->basis().seed()};
    }
    if (!a.index_file.empty()) {
        in.prepared.index = ann::load_index(a.index_file);
        in.prebuilt = true;
        cfg.backend = in.prepared.index->backend();
        if (a.index.ef_search->count() > 0) {
            auto* hnsw = dynamic_cast<ann::HnswIndex*>(in.prepared.index.get());
            if (!hnsw) {
                usage_error("--ef-search only applies to an hnsw index");
            }
            hnsw->set_ef_search(a.index.hnsw.ef_search);
            cfg.hnsw.ef_search = a.index.hnsw.ef_search;
        } else if (const auto* hnsw = dynamic_cast<const ann::HnswIndex*>(in.prepared.index.get())) {
            cfg.hnsw = hnsw->params();
        }
    } else if (in.prepared.encoder) {
        // A supplied encoder fixes the representation; index it directly.
        const auto start = std::chrono::steady_clock::now();
        in.prepared.index = build_index(
            make_item_store(in.dataset, &*in.prepared.encoder), cfg.backend, cfg.hnsw, cfg.kd);
        in.prepared.build_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    } else if (build) {
        in.prepared = prepare_index(in.dataset, cfg);
    }
    return in;
}

void
report_failures(const TraceResult& r, std::ostream& err) {
    for (const auto& f : r.check_failures) {
        err << "proxtrace: self-check failed: " << f << '\n';
    }
}

void
add_evaluate(CLI::App& app, ExperimentArgs& a) {
    auto* sub = app.add_subcommand("evaluate", "Trace infected users and score recall and latency");
    sub->configurable();
    a.add(sub);
}

int
run_evaluate(ExperimentArgs& a, const Context& ctx) {
    a.check();
    auto cfg = a.config();
    const fs::path csv = a.csv.empty() ? fs::path() : output_path(a.csv);
    auto in = load_inputs(a, cfg, true);
    const auto result = evaluate(in.dataset, in.prepared, cfg);
    write_table_header(*ctx.out);
    write_table_row(*ctx.out, result);
    if (result.speedup) {
        *ctx.out << "exhaustive median " << *result.exhaustive_median_ms << " ms, speed-up " << *result.speedup
                 << "x\n";
    }
    if (!csv.empty()) {
        ensure_parent(csv);
        std::ofstream f(csv, std::ios::trunc);
        write_tidy_header(f);
        write_tidy_rows(f, result);
        if (!f) {
            throw Error(ErrorKind::io, "cannot write " + csv.string());
        }
        ctx.sidecar(csv);
    }
    report_failures(result, *ctx.err);
    return result.check_failures.empty() ? kOk : kSelfCheckFailed;
}

struct SweepArgs {
    ExperimentArgs exp;
    std::string axis;
    std::vector<double> values;
};

void
add_sweep(CLI::App& app, SweepArgs& a) {
    auto* sub = app.add_subcommand("sweep", "Evaluate across values of r, p, M or infected-fraction");
    sub->configurable();
    a.exp.add(sub);
    sub->add_option("--axis", a.axis, "Swept parameter")
        ->check(CLI::IsMember({"r", "p", "M", "infected-fraction"}))
        ->required();
    sub->add_option("--values", a.values, "Values for the axis (space or comma separated)")
        ->delimiter(',')
        ->required();
}

int
run_sweep(SweepArgs& a, const Context& ctx) {
    a.exp.check();
    const auto axis = parse_sweep_axis(a.axis);
    if ((axis == SweepAxis::p || axis == SweepAxis::intervals) &&
        (a.exp.index_opt->count() > 0 || a.exp.encoder_opt->count() > 0)) {
        usage_error("sweeping " + a.axis + " needs a fresh encoder; drop --index and --encoder");
    }
    auto cfg = a.exp.config();
    const fs::path csv = a.exp.csv.empty() ? fs::path() : output_path(a.exp.csv);
    auto in = load_inputs(a.exp, cfg, false);

    std::vector<SweepPoint> points;
    if (in.prebuilt || in.prepared.encoder) {
        // The index is fixed, so only r and infected-fraction can move.
        for (double v : a.values) {
            SweepPoint point;
            point.value = v;
            try {
                auto at = cfg;
                if (axis == SweepAxis::r) {
                    if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
                        throw Error(ErrorKind::invalid_argument, "r must be a positive integer");
                    }
                    at.r = static_cast<std::size_t>(v);
                } else {
                    at.infected_fraction = v;
                }
                point.result = evaluate(in.dataset, in.prepared, at);
            } catch (const Error& e) {
                point.error = e.message();
            }
            points.push_back(std::move(point));
        }
    } else {
        points = sweep(in.dataset, cfg, axis, a.values);
    }

    write_table_header(*ctx.out);
    std::optional<std::ofstream> f;
    if (!csv.empty()) {
        ensure_parent(csv);
        f.emplace(csv, std::ios::trunc);
        write_tidy_header(*f);
    }
    bool ok = true;
    for (const auto& p : points) {
        if (!p.result) {
            *ctx.err << "proxtrace: sweep point " << a.axis << '=' << p.value << " failed: " << p.error << '\n';
            ok = false;
            continue;
        }
        write_table_row(*ctx.out, *p.result);
        if (f) {
            write_tidy_rows(*f, *p.result);
        }
        report_failures(*p.result, *ctx.err);
        ok = ok && p.result->check_failures.empty();
    }
    if (f) {
        if (!*f) {
            throw Error(ErrorKind::io, "cannot write " + csv.string());
        }
        f->close();
        ctx.sidecar(csv);
    }
    return ok ? kOk : kSelfCheckFailed;
}

// ---- summarize ---------------------------------------------------------------

struct SummaryArgs {
    std::string data;
    std::string out;
};

void
add_summarize(CLI::App& app, SummaryArgs& a) {
    auto* sub = app.add_subcommand("summarize", "Dataset size, extent and density");
    sub->configurable();
    sub->add_option("--data", a.data, "Dataset prefix")->required();
    sub->add_option("--out", a.out, "Write the summary here instead of standard output");
}

int
run_summarize(SummaryArgs& a, const Context& ctx) {
    const auto files = input_dataset(a.data);
    const auto ds = load_dataset(files);
    if (ds.records.empty()) {
        throw Error(ErrorKind::degenerate_data, "dataset " + a.data + " is empty");
    }
    const auto s = summarize(ds);
    if (a.out.empty()) {
        write_summary(*ctx.out, s);
    } else {
        const auto out = output_path(a.out);
        ensure_parent(out);
        std::ofstream f(out, std::ios::trunc);
        write_summary(f, s);
        if (!f) {
            throw Error(ErrorKind::io, "cannot write " + out.string());
        }
        ctx.sidecar(out);
    }
    if (ds.truth_missing) {
        *ctx.err << "proxtrace: warning: no ground-truth file for " << a.data << '\n';
    }
    return kOk;
}

int
exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument:
            return kUsage;
        case ErrorKind::io:
            return kFailure;
        default:
            return kBadData;
    }
}

}  // namespace

int
run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Privacy-preserving proximity tracing with nearest-neighbour indexes", "proxtrace"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI file (for example a .config.ini sidecar)");
    app.set_version_flag("--version", "proxtrace 0.1.0");

    WalkArgs walks;
    CheckinArgs checkins;
    FitArgs fit;
    BuildArgs build;
    ExperimentArgs eval;
    SweepArgs sweep_args;
    SummaryArgs summary;
    add_generate_walks(app, walks);
    add_generate_checkins(app, checkins);
    add_fit_encoder(app, fit);
    add_build_index(app, build);
    add_evaluate(app, eval);
    add_sweep(app, sweep_args);
    add_summarize(app, summary);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help("", CLI::AppFormatMode::Normal);
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << app.version() << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        // A help request on a subcommand surfaces here as well.
        if (e.get_exit_code() == 0) {
            for (const auto* sub : app.get_subcommands()) {
                out << sub->help();
            }
            return kOk;
        }
        err << "proxtrace: error[usage]: " << e.what() << '\n';
        return kUsage;
    }

    const Context ctx{&app, &out, &err};
    try {
        const auto* chosen = app.get_subcommands().front();
        const auto& name = chosen->get_name();
        if (name == "generate-walks") {
            return run_generate_walks(walks, ctx);
        }
        if (name == "generate-checkins") {
            return run_generate_checkins(checkins, ctx);
        }
        if (name == "fit-encoder") {
            return run_fit_encoder(fit, ctx);
        }
        if (name == "build-index") {
            return run_build_index(build, ctx);
        }
        if (name == "evaluate") {
            return run_evaluate(eval, ctx);
        }
        if (name == "sweep") {
            return run_sweep(sweep_args, ctx);
        }
        return run_summarize(summary, ctx);
    } catch (const CliError& e) {
        err << "proxtrace: error[" << e.kind << "]: " << e.message << '\n';
        return e.code;
    } catch (const Error& e) {
        err << "proxtrace: error[" << to_string(e.kind()) << "]: " << e.message() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "proxtrace: error[internal]: " << e.what() << '\n';
        return kFailure;
    }
}

int
run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(args, out, err);
}

}  // namespace proxtrace::cli
