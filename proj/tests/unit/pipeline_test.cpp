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


#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "oracles.hpp"
#include "proxtrace/ann/brute_force.hpp"
#include "proxtrace/error.hpp"
#include "proxtrace/pipeline.hpp"

namespace proxtrace {
namespace {

ErrorKind
kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorKind::io;
}

const Dataset&
walks() {
    static const Dataset ds = [] {
        WalkConfig cfg;
        cfg.n_agents = 400;
        cfg.box_edge = 20.0;
        cfg.tau_min = 30;
        cfg.tau_max = 60;
        cfg.seed = 3;
        return generate_walks(cfg);
    }();
    return ds;
}

const Dataset&
checkins() {
    static const Dataset ds = [] {
        GhostConfig cfg;
        cfg.n_real_users = 200;
        cfg.extent = 50.0;
        cfg.seed = 4;
        return generate_checkins(cfg);
    }();
    return ds;
}

TEST(SelectInfected, CountsAndDeterminism) {
    const auto& ds = walks();
    const auto all = select_infected(ds, 1.0, 1, false);
    EXPECT_EQ(all.size(), ds.records.size());
    const auto a = select_infected(ds, 0.05, 9);
    EXPECT_EQ(a.size(), 20u);
    EXPECT_EQ(a, select_infected(ds, 0.05, 9));
    EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
    for (UserId u : a) {
        EXPECT_FALSE(ds.truth.contacts_of(u).empty());
    }
    EXPECT_EQ(select_infected(ds, 1e-9, 1).size(), 1u);
    EXPECT_EQ(kind_of([&] { (void)select_infected(ds, 0.0, 1); }), ErrorKind::invalid_argument);
    EXPECT_EQ(kind_of([&] { (void)select_infected(Dataset{}, 0.5, 1); }), ErrorKind::invalid_argument);
}

TEST(SelectInfected, OnePercentOfTenThousand) {
    Dataset ds;
    for (UserId u = 0; u < 10000; ++u) {
        ds.records.push_back({u, {SpaceTimePoint(0, 0, 0, 0)}});
    }
    EXPECT_EQ(select_infected(ds, 0.01, 5).size(), 100u);
}

TEST(SelectInfected, OnlyRealUsers) {
    const auto& ds = checkins();
    for (UserId u : select_infected(ds, 1.0, 2)) {
        EXPECT_LT(u, 200);
    }
}

TEST(TraceOne, SelfExclusionAndExhaustion) {
    Dataset ds;
    for (UserId u = 0; u < 30; ++u) {
        ds.records.push_back({u, {SpaceTimePoint(u, 0, 0, 0), SpaceTimePoint(u, 1, 0, 1)}});
    }
    const auto index = build_index(make_item_store(ds), ann::Backend::kd);
    const auto found = trace_one(*index, ds.records[4], 1000);
    EXPECT_EQ(found.size(), 29u);
    EXPECT_FALSE(found.contains(4));
}

TEST(TraceOne, SharedPointIsRetrieved) {
    const auto& base = walks();
    Dataset ds = base;
    // User 7 sits exactly on user 3's fifth sample. The querying user's own
    // sample is retrieved too (and filtered), so r = 2 always suffices and
    // r = 1 suffices when the contact's item sorts first on the tie.
    ds.records[7].points[5] = ds.records[3].points[5];
    for (const auto backend : {ann::Backend::brute, ann::Backend::kd}) {
        const auto index = build_index(make_item_store(ds), backend);
        EXPECT_TRUE(trace_one(*index, ds.records[3], 2).contains(7));
        EXPECT_TRUE(trace_one(*index, ds.records[7], 2).contains(3));
        auto probe = ds.records[7];
        probe.points = {ds.records[7].points[5]};
        EXPECT_EQ(trace_one(*index, probe, 1), (std::set<UserId>{3}));
    }
}

TEST(TraceOne, PermutationInvariant) {
    const auto& ds = walks();
    const auto index = build_index(make_item_store(ds), ann::Backend::hnsw);
    auto shuffled = ds.records[10];
    Rng rng(3);
    rng.shuffle(std::span<SpaceTimePoint>(shuffled.points));
    EXPECT_EQ(trace_one(*index, ds.records[10], 20), trace_one(*index, shuffled, 20));
}

TEST(TraceOne, RepresentationMismatch) {
    const auto& ds = walks();
    const auto points = ds.all_points();
    const auto model = EncodingModel::fit(points, 8, 64, 1);
    const auto raw = build_index(make_item_store(ds), ann::Backend::brute);
    const auto enc = build_index(make_item_store(ds, &model), ann::Backend::brute);
    EXPECT_EQ(kind_of([&] { (void)trace_one(*raw, ds.records[0], 5, &model); }), ErrorKind::representation_mismatch);
    EXPECT_EQ(kind_of([&] { (void)trace_one(*enc, ds.records[0], 5); }), ErrorKind::representation_mismatch);
    EXPECT_NO_THROW((void)trace_one(*enc, ds.records[0], 5, &model));
}

TEST(TraceOne, KFinalKeepsClosestUsers) {
    Dataset ds;
    for (UserId u = 0; u < 10; ++u) {
        ds.records.push_back({u, {SpaceTimePoint(static_cast<double>(u), 0, 0, 0)}});
    }
    const auto index = build_index(make_item_store(ds), ann::Backend::brute);
    EXPECT_EQ(trace_one(*index, ds.records[0], 10, nullptr, 3), (std::set<UserId>{1, 2, 3}));
}

TEST(Evaluate, BruteRecallMonotoneInR) {
    const auto& ds = walks();
    ExperimentConfig cfg;
    cfg.backend = ann::Backend::brute;
    cfg.infected_fraction = 0.05;
    const auto points = sweep(ds, cfg, SweepAxis::r, {1, 2, 5, 10, 20, 50});
    double last = 0.0;
    for (const auto& p : points) {
        ASSERT_TRUE(p.result) << p.error;
        EXPECT_GE(p.result->recall, last);
        last = p.result->recall;
    }
}

TEST(Evaluate, ApproximateNeverBeatsBrute) {
    const auto& ds = walks();
    for (const std::size_t r : {3, 10, 30}) {
        ExperimentConfig cfg;
        cfg.infected_fraction = 0.1;
        cfg.r = r;
        cfg.backend = ann::Backend::brute;
        const double exact = evaluate(ds, cfg).recall;
        for (const auto backend : {ann::Backend::kd, ann::Backend::hnsw}) {
            cfg.backend = backend;
            EXPECT_LE(evaluate(ds, cfg).recall, exact + 1e-12);
        }
        cfg.backend = ann::Backend::kd;
        EXPECT_DOUBLE_EQ(evaluate(ds, cfg).recall, exact);
    }
}

TEST(Evaluate, RecallBookkeeping) {
    const auto& ds = walks();
    ExperimentConfig cfg;
    cfg.infected_fraction = 0.1;
    cfg.r = 5;
    const auto res = evaluate(ds, cfg);
    std::size_t tp = 0;
    std::size_t gt = 0;
    for (const auto& u : res.users) {
        std::size_t hits = 0;
        for (UserId c : ds.truth.contacts_of(u.user)) {
            hits += u.retrieved.contains(c);
        }
        EXPECT_EQ(hits, u.true_positives);
        tp += hits;
        gt += ds.truth.contacts_of(u.user).size();
    }
    EXPECT_DOUBLE_EQ(res.recall, static_cast<double>(tp) / static_cast<double>(gt));
    EXPECT_GE(res.recall, 0.0);
    EXPECT_LE(res.recall, 1.0);
    EXPECT_TRUE(res.check_failures.empty());
    EXPECT_LE(res.index_latency.mean_ms * static_cast<double>(res.index_latency.count), res.total_wall_ms);
    EXPECT_LE(res.index_latency.mean_ms, res.e2e_latency.mean_ms);
}

TEST(Evaluate, CheckinsSeparableWithExactBackends) {
    const auto& ds = checkins();
    for (const auto backend : {ann::Backend::brute, ann::Backend::kd}) {
        ExperimentConfig cfg;
        cfg.backend = backend;
        cfg.infected_fraction = 0.25;
        cfg.r = 91;
        const auto res = evaluate(ds, cfg);
        EXPECT_EQ(res.recall, 1.0);
        EXPECT_EQ(res.macro_recall, 1.0);
    }
}

TEST(Evaluate, ThreadsDoNotChangeResults) {
    const auto& ds = walks();
    ExperimentConfig cfg;
    cfg.backend = ann::Backend::hnsw;
    cfg.infected_fraction = 0.1;
    const auto prepared = prepare_index(ds, cfg);
    const auto one = evaluate(ds, prepared, cfg);
    cfg.threads = 3;
    const auto three = evaluate(ds, prepared, cfg);
    EXPECT_EQ(one.recall, three.recall);
    ASSERT_EQ(one.users.size(), three.users.size());
    for (std::size_t i = 0; i < one.users.size(); ++i) {
        EXPECT_EQ(one.users[i].retrieved, three.users[i].retrieved);
    }
    EXPECT_EQ(one.index_latency.count, three.index_latency.count);
}

TEST(Evaluate, ExhaustiveTiming) {
    const auto& ds = walks();
    ExperimentConfig cfg;
    cfg.backend = ann::Backend::kd;
    cfg.infected_fraction = 0.02;
    cfg.measure_exhaustive = true;
    cfg.exhaustive_queries = 10;
    const auto res = evaluate(ds, cfg);
    ASSERT_TRUE(res.exhaustive_median_ms);
    ASSERT_TRUE(res.speedup);
    EXPECT_GT(*res.speedup, 0.0);
}

TEST(Sweep, SingleValueEqualsEvaluate) {
    const auto& ds = walks();
    ExperimentConfig cfg;
    cfg.infected_fraction = 0.05;
    cfg.encoding = EncodingParams{8, 32, 2};
    const auto points = sweep(ds, cfg, SweepAxis::intervals, {32});
    ASSERT_EQ(points.size(), 1u);
    ASSERT_TRUE(points[0].result);
    const auto direct = evaluate(ds, cfg);
    EXPECT_EQ(points[0].result->recall, direct.recall);
    for (std::size_t i = 0; i < direct.users.size(); ++i) {
        EXPECT_EQ(points[0].result->users[i].retrieved, direct.users[i].retrieved);
    }
}

TEST(Sweep, FailuresAreRecordedAndSweepContinues) {
    const auto& ds = walks();
    ExperimentConfig cfg;
    cfg.infected_fraction = 0.05;
    const auto points = sweep(ds, cfg, SweepAxis::r, {5, 0, 2.5, 10});
    ASSERT_EQ(points.size(), 4u);
    EXPECT_TRUE(points[0].result);
    EXPECT_FALSE(points[1].result);
    EXPECT_FALSE(points[1].error.empty());
    EXPECT_FALSE(points[2].result);
    EXPECT_TRUE(points[3].result);
    EXPECT_EQ(kind_of([&] { (void)sweep(ds, cfg, SweepAxis::r, {}); }), ErrorKind::invalid_argument);
}

TEST(Sweep, EncodingAxesOnRawConfig) {
    const auto& ds = walks();
    ExperimentConfig cfg;
    cfg.infected_fraction = 0.05;
    const auto points = sweep(ds, cfg, SweepAxis::p, {2, 4});
    for (const auto& p : points) {
        ASSERT_TRUE(p.result) << p.error;
        ASSERT_TRUE(p.result->config.encoding);
        EXPECT_EQ(p.result->config.encoding->p, static_cast<std::size_t>(p.value));
        EXPECT_EQ(p.result->config.encoding->intervals, 128u);
    }
}

TEST(Results, TableAndTidyRows) {
    const auto& ds = walks();
    ExperimentConfig cfg;
    cfg.dataset_label = "walk-400";
    cfg.encoding = EncodingParams{};
    cfg.backend = ann::Backend::hnsw;
    const auto res = evaluate(ds, cfg);
    std::ostringstream table;
    write_table_header(table);
    write_table_row(table, res);
    EXPECT_NE(table.str().find("PP-hnsw"), std::string::npos);
    EXPECT_NE(table.str().find("walk-400"), std::string::npos);

    std::ostringstream tidy;
    write_tidy_header(tidy);
    write_tidy_rows(tidy, res);
    EXPECT_NE(tidy.str().find("walk-400,hnsw,16,128,100,0.01,recall,"), std::string::npos) << tidy.str();
}

TEST(Latency, MedianAndMean) {
    const auto s = latency_stats({4.0, 1.0, 3.0, 2.0});
    EXPECT_EQ(s.count, 4u);
    EXPECT_DOUBLE_EQ(s.mean_ms, 2.5);
    EXPECT_DOUBLE_EQ(s.median_ms, 2.5);
    EXPECT_DOUBLE_EQ(latency_stats({5.0, 1.0, 9.0}).median_ms, 5.0);
    EXPECT_EQ(latency_stats({}).count, 0u);
}

}  // namespace
}  // namespace proxtrace
