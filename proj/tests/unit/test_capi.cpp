#include "hkdyn/hkdyn.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

struct Scn {
    hk_scenario* p = nullptr;
    ~Scn() { hk_scenario_free(p); }
};
struct Trj {
    hk_trajectory* p = nullptr;
    ~Trj() { hk_trajectory_free(p); }
};

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / (std::string("hkdyn_capi_") + name)).string();
}

}  // namespace

TEST(CApi, BuiltinsAreListedAndLoad) {
    ASSERT_GT(hk_builtin_count(), 10u);
    EXPECT_EQ(hk_builtin_name(hk_builtin_count()), nullptr);
    for (std::size_t k = 0; k < hk_builtin_count(); ++k) {
        Scn s;
        ASSERT_EQ(hk_scenario_builtin(hk_builtin_name(k), &s.p), HK_OK) << hk_builtin_name(k);
        EXPECT_STREQ(hk_scenario_name(s.p), hk_builtin_name(k));
    }
}

TEST(CApi, ErrorsCarryStatusAndMessage) {
    Scn s;
    EXPECT_EQ(hk_scenario_builtin("no-such-thing", &s.p), HK_E_ARGUMENT);
    EXPECT_EQ(s.p, nullptr);
    EXPECT_NE(std::string(hk_last_error()).find("no-such-thing"), std::string::npos);
    EXPECT_EQ(hk_scenario_builtin(nullptr, &s.p), HK_E_ARGUMENT);
    EXPECT_EQ(hk_scenario_builtin("ic-e", nullptr), HK_E_ARGUMENT);
    EXPECT_EQ(hk_scenario_remark71(0.6, &s.p), HK_E_ARGUMENT);
    EXPECT_STREQ(hk_status_name(HK_E_BRANCH), "branch");
    EXPECT_STREQ(hk_status_name(HK_OK), "ok");

    ASSERT_EQ(hk_scenario_builtin("ic-e-closed", &s.p), HK_OK);
    Trj t;
    EXPECT_EQ(hk_solve_caratheodory(s.p, "wait=1:1-2", 5.0, &t.p), HK_E_BRANCH);
    EXPECT_EQ(hk_solve_caratheodory(s.p, "wait=zero:1-2", 5.0, &t.p), HK_E_PARSE);
    EXPECT_EQ(t.p, nullptr);
    EXPECT_EQ(hk_trajectory_load_csv(temp_path("missing.csv").c_str(), &t.p), HK_E_IO);
    hk_scenario_free(nullptr);
    hk_trajectory_free(nullptr);
    hk_clusters_free(nullptr);
}

TEST(CApi, ScenarioAccessors) {
    Scn s;
    const double x[] = {0.0, 0.5};
    ASSERT_EQ(hk_scenario_create(2, 1, x, nullptr, 1.0, HK_OPEN, &s.p), HK_OK);
    EXPECT_EQ(hk_scenario_agents(s.p), 2u);
    EXPECT_EQ(hk_scenario_dim(s.p), 1u);
    EXPECT_EQ(hk_scenario_variant(s.p), HK_OPEN);
    double pos[2];
    ASSERT_EQ(hk_scenario_positions(s.p, pos), HK_OK);
    EXPECT_EQ(pos[1], 0.5);
    double v;
    EXPECT_EQ(hk_scenario_expected(s.p, "nothing", &v), HK_E_ARGUMENT);
    Scn c;
    ASSERT_EQ(hk_scenario_clss10(&c.p), HK_OK);
    ASSERT_EQ(hk_scenario_expected(c.p, "B", &v), HK_OK);
    EXPECT_NEAR(v, 127.0 / (10.0 * std::sqrt(91.0)), 1e-15);
    EXPECT_EQ(hk_scenario_create(2, 1, x, nullptr, 0.0, HK_OPEN, &s.p), HK_E_ARGUMENT);
}

TEST(CApi, SolveQueryAndAnalyse) {
    Scn s;
    ASSERT_EQ(hk_scenario_builtin("ic-e", &s.p), HK_OK);
    Trj beta;
    ASSERT_EQ(hk_solve_caratheodory(s.p, "wait=0:both", 10.0, &beta.p), HK_OK);
    ASSERT_GT(hk_trajectory_size(beta.p), 2u);
    EXPECT_EQ(hk_trajectory_agents(beta.p), 3u);
    EXPECT_EQ(hk_trajectory_time(beta.p, 0), 0.0);
    std::vector<double> x(3);
    ASSERT_EQ(hk_trajectory_at(beta.p, 10.0, x.data()), HK_OK);
    for (double v : x) EXPECT_NEAR(v, 0.0, 1e-3);
    EXPECT_EQ(hk_trajectory_state(beta.p, hk_trajectory_size(beta.p), x.data()), HK_E_INDEX);
    ASSERT_GE(hk_trajectory_event_count(beta.p), 1u);
    double et;
    const char *pairs, *classes, *action;
    ASSERT_EQ(hk_trajectory_event(beta.p, 0, &et, &pairs, &classes, &action), HK_OK);
    EXPECT_EQ(et, 0.0);
    EXPECT_STREQ(pairs, "1-2,2-3");

    double d;
    ASSERT_EQ(hk_barycenter_drift(beta.p, &d), HK_OK);
    EXPECT_LE(d, 1e-9);
    ASSERT_EQ(hk_hull_violation(beta.p, 1, &d), HK_OK);
    EXPECT_LE(d, 1e-8);
    ASSERT_EQ(hk_lyapunov_increase(beta.p, s.p, &d), HK_OK);
    EXPECT_LE(d, 1e-9);
    double wt;
    ASSERT_EQ(hk_inclusion_residual(beta.p, s.p, &d, &wt), HK_OK);
    EXPECT_LE(d, 1e-6);

    Trj sl;
    ASSERT_EQ(hk_solve_sliding(s.p, "1-2@0:inf", 10.0, nullptr, &sl.p), HK_OK);
    double a;
    ASSERT_EQ(hk_inclusion_alpha(sl.p, s.p, 1, 2, 1.0, &a), HK_OK);
    EXPECT_NEAR(a, 0.5 * std::exp(-1.5), 1e-4);

    Trj gamma;
    ASSERT_EQ(hk_solve_caratheodory(s.p, "wait=0:1-2;wait=inf:2-3", 30.0, &gamma.p), HK_OK);
    hk_clusters* cl = nullptr;
    ASSERT_EQ(hk_cluster_report(gamma.p, HK_OPEN, 1e-6, 1e-6, &cl), HK_OK);
    EXPECT_EQ(hk_clusters_count(cl), 2u);
    EXPECT_EQ(hk_clusters_violations(cl), 0u);
    std::size_t labels[3];
    ASSERT_EQ(hk_clusters_labels(cl, labels), HK_OK);
    EXPECT_EQ(labels[0], labels[1]);
    EXPECT_NE(labels[0], labels[2]);
    hk_clusters_free(cl);

    double mx, div, fin;
    ASSERT_EQ(hk_compare(beta.p, gamma.p, 1e-6, &mx, &div, &fin), HK_OK);
    EXPECT_GT(mx, 0.5);
    EXPECT_GE(div, 0.0);
}

TEST(CApi, CrossingClassification) {
    Scn s;
    const double x[] = {-1.0, 0.0, 0.5};
    ASSERT_EQ(hk_scenario_create(3, 1, x, nullptr, 1.0, HK_OPEN, &s.p), HK_OK);
    hk_crossing c;
    ASSERT_EQ(hk_classify_crossing(s.p, 1, 2, &c), HK_OK);
    EXPECT_EQ(c, HK_BIDIRECTIONAL);
    EXPECT_EQ(hk_classify_crossing(s.p, 2, 3, &c), HK_E_CLASSIFICATION);
    EXPECT_EQ(hk_classify_crossing(s.p, 2, 2, &c), HK_E_INDEX);
    EXPECT_STREQ(hk_crossing_name(static_cast<hk_crossing>(99)), "unknown");
}

TEST(CApi, FilesRoundTrip) {
    Scn s;
    ASSERT_EQ(hk_scenario_builtin("square4", &s.p), HK_OK);
    const auto sp = temp_path("square.scn");
    ASSERT_EQ(hk_scenario_save(s.p, sp.c_str()), HK_OK);
    Scn back;
    ASSERT_EQ(hk_scenario_load(sp.c_str(), &back.p), HK_OK);
    double a[8], b[8];
    hk_scenario_positions(s.p, a);
    hk_scenario_positions(back.p, b);
    for (int k = 0; k < 8; ++k) EXPECT_EQ(a[k], b[k]);

    Trj t;
    ASSERT_EQ(hk_solve_caratheodory(s.p, "wait=0:1-2,3-4;wait=inf:2-3,1-4", 10.0, &t.p), HK_OK);
    const auto cp = temp_path("square.csv"), ep = temp_path("square.csv.events");
    ASSERT_EQ(hk_trajectory_save_csv(t.p, cp.c_str()), HK_OK);
    ASSERT_EQ(hk_trajectory_save_events(t.p, ep.c_str()), HK_OK);
    Trj r;
    ASSERT_EQ(hk_trajectory_load_csv(cp.c_str(), &r.p), HK_OK);
    ASSERT_EQ(hk_trajectory_load_events(r.p, ep.c_str()), HK_OK);
    ASSERT_EQ(hk_trajectory_size(r.p), hk_trajectory_size(t.p));
    EXPECT_EQ(hk_trajectory_event_count(r.p), hk_trajectory_event_count(t.p));
    double mx, div, fin;
    ASSERT_EQ(hk_compare(t.p, r.p, 0.0, &mx, &div, &fin), HK_OK);
    EXPECT_EQ(mx, 0.0);
    std::ofstream(cp) << "garbage\n";
    Trj bad;
    EXPECT_EQ(hk_trajectory_load_csv(cp.c_str(), &bad.p), HK_E_PARSE);
    std::remove(sp.c_str());
    std::remove(cp.c_str());
    std::remove(ep.c_str());
}

TEST(CApi, Enumeration) {
    std::size_t n = 0;
    ASSERT_EQ(hk_composition_count(6, HK_OPEN, &n), HK_OK);
    EXPECT_EQ(n, 32u);
    ASSERT_EQ(hk_composition_count(4, HK_CLOSED, &n), HK_OK);
    EXPECT_EQ(n, 5u);
    EXPECT_EQ(hk_composition_count(0, HK_OPEN, &n), HK_E_ARGUMENT);
    int matches = 0;
    ASSERT_EQ(hk_explore_zero_wait(5, HK_CLOSED, &n, &matches), HK_OK);
    EXPECT_EQ(matches, 1);
}
