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


#include "proxtrace/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "proxtrace/ann/brute_force.hpp"
#include "proxtrace/detail/text.hpp"
#include "proxtrace/error.hpp"
#include "proxtrace/rng.hpp"

namespace proxtrace {

namespace {

using Clock = std::chrono::steady_clock;

double
elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

struct QueryTimes {
    std::vector<double> index_ms;
    std::vector<double> e2e_ms;
};

void
check_representation(const ann::NeighborIndex& index, const EncodingModel* encoder) {
    const bool encoded = index.representation() == ann::Representation::encoded;
    if (encoded != (encoder != nullptr)) {
        throw Error(ErrorKind::representation_mismatch,
                    std::string("index holds ") + std::string(ann::to_string(index.representation())) +
                        " points but the query path is " + (encoder ? "encoded" : "raw"));
    }
    const std::size_t want = encoder ? encoder->output_dim() : kSpaceTimeDim;
    if (index.dim() != want) {
        throw Error(ErrorKind::representation_mismatch,
                    "index dimension " + std::to_string(index.dim()) + " does not match query dimension " +
                        std::to_string(want));
    }
}

std::set<UserId>
trace_timed(const ann::NeighborIndex& index,
            const TrajectoryRecord& infected,
            std::size_t r,
            const EncodingModel* encoder,
            std::optional<std::size_t> k_final,
            QueryTimes* times) {
    std::map<UserId, double> best;
    for (const auto& point : infected.points) {
        const auto start = Clock::now();
        std::vector<double> query;
        if (encoder) {
            query = ann::to_query(encoder->encode(point));
        } else {
            query.assign(point.coords().begin(), point.coords().end());
        }
        const auto search_start = Clock::now();
        const auto found = index.search(query, r);
        if (times) {
            times->index_ms.push_back(elapsed_ms(search_start));
            times->e2e_ms.push_back(elapsed_ms(start));
        }
        for (const auto& hit : found) {
            if (hit.user_id == infected.user_id) {
                continue;
            }
            auto [it, inserted] = best.try_emplace(hit.user_id, hit.distance);
            if (!inserted) {
                it->second = std::min(it->second, hit.distance);
            }
        }
    }
    std::set<UserId> out;
    if (k_final && *k_final < best.size()) {
        std::vector<std::pair<double, UserId>> ranked;
        ranked.reserve(best.size());
        for (const auto& [user, d] : best) {
            ranked.emplace_back(d, user);
        }
        std::sort(ranked.begin(), ranked.end());
        for (std::size_t i = 0; i < *k_final; ++i) {
            out.insert(ranked[i].second);
        }
    } else {
        for (const auto& entry : best) {
            out.insert(entry.first);
        }
    }
    return out;
}

const TrajectoryRecord*
find_record(const Dataset& dataset, UserId user) {
    const auto it = std::lower_bound(dataset.records.begin(),
                                     dataset.records.end(),
                                     user,
                                     [](const TrajectoryRecord& r, UserId u) { return r.user_id < u; });
    if (it == dataset.records.end() || it->user_id != user) {
        throw Error(ErrorKind::invalid_argument, "user " + std::to_string(user) + " is not in the dataset");
    }
    return &*it;
}

}  // namespace

void
ExperimentConfig::validate() const {
    if (!(infected_fraction > 0.0 && infected_fraction <= 1.0)) {
        throw Error(ErrorKind::invalid_argument, "infected fraction must lie in (0, 1]");
    }
    if (r < 1) {
        throw Error(ErrorKind::invalid_argument, "r must be at least 1");
    }
    if (k_final && *k_final < 1) {
        throw Error(ErrorKind::invalid_argument, "k_final must be at least 1");
    }
    if (encoding) {
        if (encoding->p < 1) {
            throw Error(ErrorKind::invalid_argument, "encoding p must be at least 1");
        }
        if (encoding->intervals < 1) {
            throw Error(ErrorKind::invalid_argument, "encoding M must be at least 1");
        }
    }
    if (threads < 1) {
        throw Error(ErrorKind::invalid_argument, "threads must be at least 1");
    }
    hnsw.validate();
}

std::vector<UserId>
select_infected(const Dataset& dataset, double fraction, std::uint64_t seed, bool evaluable_only) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw Error(ErrorKind::invalid_argument, "infected fraction must lie in (0, 1]");
    }
    std::vector<UserId> evaluable;
    std::vector<UserId> rest;
    for (const auto& rec : dataset.records) {
        if (!dataset.is_real_user(rec.user_id)) {
            continue;
        }
        if (evaluable_only && !dataset.truth.contacts_of(rec.user_id).empty()) {
            evaluable.push_back(rec.user_id);
        } else {
            rest.push_back(rec.user_id);
        }
    }
    const std::size_t n = evaluable.size() + rest.size();
    if (n == 0) {
        throw Error(ErrorKind::invalid_argument, "dataset has no users to infect");
    }
    // The small slack keeps 0.01 * 10000 at 100 despite rounding.
    const auto count = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9)), 1, n);
    Rng rng(seed);
    rng.shuffle(std::span<UserId>(evaluable));
    rng.shuffle(std::span<UserId>(rest));
    evaluable.insert(evaluable.end(), rest.begin(), rest.end());
    evaluable.resize(count);
    std::sort(evaluable.begin(), evaluable.end());
    return evaluable;
}

ann::ItemStore
make_item_store(const Dataset& dataset, const EncodingModel* encoder) {
    ann::ItemStore items(encoder ? ann::Representation::encoded : ann::Representation::raw,
                         encoder ? encoder->output_dim() : kSpaceTimeDim);
    items.reserve(dataset.instance_count());
    std::int64_t next_id = 0;
    for (const auto& rec : dataset.records) {
        for (std::size_t t = 0; t < rec.points.size(); ++t) {
            const ann::ItemInfo info{next_id++, rec.user_id, static_cast<std::uint32_t>(t)};
            if (encoder) {
                items.add(info, encoder->encode(rec.points[t]));
            } else {
                items.add(info, std::span<const double>(rec.points[t].coords()));
            }
        }
    }
    return items;
}

std::unique_ptr<ann::NeighborIndex>
build_index(ann::ItemStore items, ann::Backend backend, const ann::HnswParams& hnsw, const ann::KdOptions& kd) {
    switch (backend) {
        case ann::Backend::brute:
            return std::make_unique<ann::BruteForceIndex>(std::move(items));
        case ann::Backend::kd:
            return std::make_unique<ann::KdTree>(std::move(items), kd);
        case ann::Backend::hnsw:
            return std::make_unique<ann::HnswIndex>(ann::HnswIndex::build(items, hnsw));
    }
    throw Error(ErrorKind::invalid_argument, "unknown backend");
}

PreparedIndex
prepare_index(const Dataset& dataset, const ExperimentConfig& config) {
    config.validate();
    if (dataset.records.empty()) {
        throw Error(ErrorKind::invalid_argument, "dataset is empty");
    }
    const auto start = Clock::now();
    PreparedIndex out;
    if (config.encoding) {
        const auto points = dataset.all_points();
        out.encoder = EncodingModel::fit(points, config.encoding->p, config.encoding->intervals, config.encoding->seed);
    }
    out.index = build_index(make_item_store(dataset, out.encoder ? &*out.encoder : nullptr),
                            config.backend,
                            config.hnsw,
                            config.kd);
    out.build_ms = elapsed_ms(start);
    return out;
}

std::set<UserId>
trace_one(const ann::NeighborIndex& index,
          const TrajectoryRecord& infected,
          std::size_t r,
          const EncodingModel* encoder,
          std::optional<std::size_t> k_final) {
    if (r < 1) {
        throw Error(ErrorKind::invalid_argument, "r must be at least 1");
    }
    check_representation(index, encoder);
    return trace_timed(index, infected, r, encoder, k_final, nullptr);
}

LatencyStats
latency_stats(std::vector<double> samples_ms) {
    LatencyStats s;
    s.count = samples_ms.size();
    if (samples_ms.empty()) {
        return s;
    }
    s.mean_ms = std::accumulate(samples_ms.begin(), samples_ms.end(), 0.0) / static_cast<double>(s.count);
    const auto mid = samples_ms.begin() + static_cast<std::ptrdiff_t>(s.count / 2);
    std::nth_element(samples_ms.begin(), mid, samples_ms.end());
    s.median_ms = *mid;
    if (s.count % 2 == 0) {
        s.median_ms = (s.median_ms + *std::max_element(samples_ms.begin(), mid)) / 2.0;
    }
    return s;
}

TraceResult
evaluate(const Dataset& dataset, const PreparedIndex& prepared, const ExperimentConfig& config) {
    config.validate();
    if (!prepared.index) {
        throw Error(ErrorKind::invalid_argument, "no index prepared");
    }
    const EncodingModel* encoder = prepared.encoder ? &*prepared.encoder : nullptr;
    check_representation(*prepared.index, encoder);

    TraceResult result;
    result.config = config;
    result.build_ms = prepared.build_ms;
    const auto infected = select_infected(dataset, config.infected_fraction, config.query_seed, config.evaluable_only);
    result.infected = infected.size();
    result.users.resize(infected.size());

    std::vector<const TrajectoryRecord*> records;
    records.reserve(infected.size());
    for (UserId u : infected) {
        records.push_back(find_record(dataset, u));
    }

    const std::size_t workers = std::min(config.threads, std::max<std::size_t>(1, infected.size()));
    std::vector<QueryTimes> times(workers);
    const auto wall_start = Clock::now();
    const auto run_range = [&](std::size_t w) {
        const std::size_t lo = infected.size() * w / workers;
        const std::size_t hi = infected.size() * (w + 1) / workers;
        for (std::size_t i = lo; i < hi; ++i) {
            auto& trace = result.users[i];
            trace.user = infected[i];
            trace.retrieved =
                trace_timed(*prepared.index, *records[i], config.r, encoder, config.k_final, &times[w]);
        }
    };
    if (workers == 1) {
        run_range(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(run_range, w);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    result.total_wall_ms = elapsed_ms(wall_start);

    std::vector<double> index_ms;
    std::vector<double> e2e_ms;
    for (auto& t : times) {
        index_ms.insert(index_ms.end(), t.index_ms.begin(), t.index_ms.end());
        e2e_ms.insert(e2e_ms.end(), t.e2e_ms.begin(), t.e2e_ms.end());
    }
    result.index_latency = latency_stats(std::move(index_ms));
    result.e2e_latency = latency_stats(std::move(e2e_ms));

    std::size_t pooled_tp = 0;
    std::size_t pooled_truth = 0;
    double macro_sum = 0.0;
    for (auto& trace : result.users) {
        const auto& truth = dataset.truth.contacts_of(trace.user);
        trace.truth_size = truth.size();
        trace.true_positives = static_cast<std::size_t>(std::count_if(
            truth.begin(), truth.end(), [&](UserId c) { return trace.retrieved.contains(c); }));
        if (trace.truth_size > 0) {
            pooled_tp += trace.true_positives;
            pooled_truth += trace.truth_size;
            macro_sum += static_cast<double>(trace.true_positives) / static_cast<double>(trace.truth_size);
            ++result.evaluable_users;
        }
        if (trace.retrieved.contains(trace.user)) {
            result.check_failures.push_back("user " + std::to_string(trace.user) + " retrieved itself");
        }
    }
    if (pooled_truth > 0) {
        result.recall = static_cast<double>(pooled_tp) / static_cast<double>(pooled_truth);
        result.macro_recall = macro_sum / static_cast<double>(result.evaluable_users);
    }

    if (config.measure_exhaustive) {
        std::vector<std::vector<double>> battery;
        for (const auto* rec : records) {
            for (const auto& point : rec->points) {
                if (encoder) {
                    battery.push_back(ann::to_query(encoder->encode(point)));
                } else {
                    battery.emplace_back(point.coords().begin(), point.coords().end());
                }
            }
        }
        const std::size_t take = config.exhaustive_queries == 0
                                     ? battery.size()
                                     : std::min(config.exhaustive_queries, battery.size());
        std::vector<double> brute_ms;
        std::vector<double> sampled_index_ms;
        brute_ms.reserve(take);
        for (std::size_t i = 0; i < take; ++i) {
            const auto& q = battery[i * battery.size() / take];
            auto start = Clock::now();
            const auto exact = ann::brute_force_knn(q, config.r, prepared.index->items());
            brute_ms.push_back(elapsed_ms(start));
            start = Clock::now();
            const auto approx = prepared.index->search(q, config.r);
            sampled_index_ms.push_back(elapsed_ms(start));
        }
        if (take > 0) {
            const auto brute = latency_stats(std::move(brute_ms));
            const auto fast = latency_stats(std::move(sampled_index_ms));
            result.exhaustive_median_ms = brute.median_ms;
            if (fast.median_ms > 0.0) {
                result.speedup = brute.median_ms / fast.median_ms;
            }
        }
    }

    if (!(result.recall >= 0.0 && result.recall <= 1.0)) {
        result.check_failures.push_back("recall outside [0, 1]");
    }
    if (result.index_latency.mean_ms * static_cast<double>(result.index_latency.count) >
        result.total_wall_ms * static_cast<double>(workers) + 1e-6) {
        result.check_failures.push_back("summed query time exceeds wall time");
    }
    return result;
}

TraceResult
evaluate(const Dataset& dataset, const ExperimentConfig& config) {
    const auto prepared = prepare_index(dataset, config);
    return evaluate(dataset, prepared, config);
}

SweepAxis
parse_sweep_axis(std::string_view name) {
    if (name == "r") {
        return SweepAxis::r;
    }
    if (name == "p") {
        return SweepAxis::p;
    }
    if (name == "M" || name == "m" || name == "intervals") {
        return SweepAxis::intervals;
    }
    if (name == "infected_fraction" || name == "infected-fraction" || name == "fraction") {
        return SweepAxis::infected_fraction;
    }
    throw Error(ErrorKind::invalid_argument, "unknown sweep axis '" + std::string(name) + "'");
}

std::string_view
to_string(SweepAxis axis) noexcept {
    switch (axis) {
        case SweepAxis::r:
            return "r";
        case SweepAxis::p:
            return "p";
        case SweepAxis::intervals:
            return "M";
        case SweepAxis::infected_fraction:
            return "infected_fraction";
    }
    return "?";
}

namespace {

std::size_t
as_count(double value, SweepAxis axis) {
    if (!(value >= 1.0) || value != std::floor(value) || value > 4294967295.0) {
        throw Error(ErrorKind::invalid_argument,
                    std::string(to_string(axis)) + " must be a positive integer, got " + detail::format_double(value));
    }
    return static_cast<std::size_t>(value);
}

ExperimentConfig
at_value(const ExperimentConfig& base, SweepAxis axis, double value) {
    ExperimentConfig cfg = base;
    switch (axis) {
        case SweepAxis::r:
            cfg.r = as_count(value, axis);
            break;
        case SweepAxis::p:
            cfg.encoding = cfg.encoding.value_or(EncodingParams{});
            cfg.encoding->p = as_count(value, axis);
            break;
        case SweepAxis::intervals:
            cfg.encoding = cfg.encoding.value_or(EncodingParams{});
            cfg.encoding->intervals = static_cast<std::uint32_t>(as_count(value, axis));
            break;
        case SweepAxis::infected_fraction:
            cfg.infected_fraction = value;
            break;
    }
    cfg.validate();
    return cfg;
}

}  // namespace

std::vector<SweepPoint>
sweep(const Dataset& dataset, const ExperimentConfig& base, SweepAxis axis, const std::vector<double>& values) {
    if (values.empty()) {
        throw Error(ErrorKind::invalid_argument, "sweep needs at least one value");
    }
    const bool shared_index = axis == SweepAxis::r || axis == SweepAxis::infected_fraction;
    std::optional<PreparedIndex> prepared;
    std::vector<SweepPoint> out;
    out.reserve(values.size());
    for (double value : values) {
        SweepPoint point;
        point.value = value;
        try {
            const auto cfg = at_value(base, axis, value);
            if (!shared_index || !prepared) {
                prepared = prepare_index(dataset, cfg);
            }
            point.result = evaluate(dataset, *prepared, cfg);
        } catch (const Error& e) {
            point.error = e.what();
        }
        out.push_back(std::move(point));
    }
    return out;
}

namespace {

std::string
encoding_field(const TraceResult& r, bool p) {
    if (!r.config.encoding) {
        return "-";
    }
    return std::to_string(p ? r.config.encoding->p : r.config.encoding->intervals);
}

std::string
fixed(double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

}  // namespace

void
write_table_header(std::ostream& out) {
    out << std::left << std::setw(16) << "dataset" << std::setw(8) << "index" << std::right << std::setw(10)
        << "#infected" << std::setw(5) << "p" << std::setw(6) << "M" << std::setw(6) << "r" << std::setw(12)
        << "time_ms" << std::setw(12) << "e2e_ms" << std::setw(9) << "recall" << '\n';
}

void
write_table_row(std::ostream& out, const TraceResult& r) {
    std::string index = r.config.encoding ? "PP-" : "";
    index += ann::to_string(r.config.backend);
    out << std::left << std::setw(16) << r.config.dataset_label << std::setw(8) << index << std::right
        << std::setw(10) << r.infected << std::setw(5) << encoding_field(r, true) << std::setw(6)
        << encoding_field(r, false) << std::setw(6) << r.config.r << std::setw(12)
        << fixed(r.index_latency.median_ms, 4) << std::setw(12) << fixed(r.e2e_latency.median_ms, 4)
        << std::setw(9) << fixed(r.recall, 4) << '\n';
}

void
write_tidy_header(std::ostream& out) {
    out << "dataset,backend,p,M,r,infected_fraction,metric,value\n";
}

void
write_tidy_rows(std::ostream& out, const TraceResult& r) {
    std::ostringstream key;
    key << r.config.dataset_label << ',' << ann::to_string(r.config.backend) << ',' << encoding_field(r, true)
        << ',' << encoding_field(r, false) << ',' << r.config.r << ','
        << detail::format_double(r.config.infected_fraction) << ',';
    const auto row = [&](std::string_view metric, double value) {
        out << key.str() << metric << ',' << detail::format_double(value) << '\n';
    };
    row("infected", static_cast<double>(r.infected));
    row("evaluable_users", static_cast<double>(r.evaluable_users));
    row("recall", r.recall);
    row("macro_recall", r.macro_recall);
    row("queries", static_cast<double>(r.index_latency.count));
    row("index_median_ms", r.index_latency.median_ms);
    row("index_mean_ms", r.index_latency.mean_ms);
    row("e2e_median_ms", r.e2e_latency.median_ms);
    row("e2e_mean_ms", r.e2e_latency.mean_ms);
    row("total_wall_ms", r.total_wall_ms);
    row("build_ms", r.build_ms);
    if (r.exhaustive_median_ms) {
        row("exhaustive_median_ms", *r.exhaustive_median_ms);
    }
    if (r.speedup) {
        row("speedup", *r.speedup);
    }
}

}  // namespace proxtrace
