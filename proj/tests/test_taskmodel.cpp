#include <gtest/gtest.h>

#include <cmath>

#include "mecsc/taskmodel.hpp"
#include "support.hpp"

using namespace mecsc;
using oracle::handmade_problem;

namespace {

SystemConfig worked_example_config() {
    SystemConfig cfg;
    cfg.overhead_slope = 1e5;
    cfg.overhead_intercept = 1e6;
    cfg.bits_per_unit = 1000.0;
    return cfg;
}

}  // namespace

TEST(DelayChain, OverheadAndLocalDelay) {
    const SystemConfig cfg = worked_example_config();
    EXPECT_DOUBLE_EQ(overhead_cycles(600.0, cfg), 6.1e7);
    EXPECT_DOUBLE_EQ(overhead_cycles(0.0, cfg), 1e6);
    EXPECT_NEAR(local_delay(600.0, cfg), 6.1e7 / 1.4e9, 1e-15);
    EXPECT_NEAR(local_delay(600.0, cfg), 0.0436, 1e-4);
}

TEST(DelayChain, CompressionCommunicationComputation) {
    const SystemConfig cfg = worked_example_config();
    const double b = compressed_volume(1000.0, 4.0);
    EXPECT_DOUBLE_EQ(b, 250.0);
    EXPECT_NEAR(comm_delay(b, 1.332e6, cfg), 0.1877, 1e-4);
    EXPECT_NEAR(offload_comp_delay(b, 5e9, cfg), 0.0052, 1e-12);
    EXPECT_NEAR(comm_delay(b, 1.332e6, cfg) + offload_comp_delay(b, 5e9, cfg), 0.1929, 1e-4);
}

TEST(DelayChain, RatioOneKeepsVolume) { EXPECT_DOUBLE_EQ(compressed_volume(700.0, 1.0), 700.0); }

TEST(DelayChain, InvalidInputsThrow) {
    const SystemConfig cfg;
    EXPECT_THROW(compressed_volume(100.0, 0.5), ConstraintViolation);
    EXPECT_THROW(offload_comp_delay(100.0, 0.0, cfg), DomainError);
    EXPECT_THROW(accuracy(0.0, FitParams{}), DomainError);
}

TEST(Accuracy, PowerLawValues) {
    const FitParams fit;
    EXPECT_DOUBLE_EQ(accuracy(1.0, fit), 20.0);
    EXPECT_NEAR(accuracy(1e9, fit), 100.0, 0.01);
    const double a85 = volume_for_accuracy(85.0, fit);
    EXPECT_NEAR(a85, std::pow(80.0 / 15.0, 1.0 / 0.6), 1e-12);
    EXPECT_NEAR(a85, 16.28, 0.01);
    EXPECT_NEAR(accuracy(a85, fit), 85.0, 1e-12);
}

TEST(Accuracy, IncreasingAndBelowAsymptote) {
    const FitParams fit;
    double prev = -INFINITY;
    for (double a = 0.5; a < 1e7; a *= 1.7) {
        const double y = accuracy(a, fit);
        EXPECT_GT(y, prev);
        EXPECT_LT(y, fit.p);
        prev = y;
    }
}

TEST(Accuracy, UnreachableTargets) {
    EXPECT_TRUE(std::isinf(volume_for_accuracy(100.0, FitParams{})));
    EXPECT_TRUE(std::isinf(volume_for_accuracy(50.0, FitParams{100.0, 80.0, 0.0})));
    EXPECT_EQ(volume_for_accuracy(10.0, FitParams{100.0, 80.0, 0.0}), 0.0);
}

TEST(Utility, SingleUserValue) {
    EXPECT_NEAR(user_utility(1.0, 85.0, 0.02), std::log(4250.0), 1e-12);
    EXPECT_NEAR(user_utility(1.0, 85.0, 0.02), 8.3547, 1e-4);
}

TEST(Utility, WeightAddsConstantPerUser) {
    SystemConfig cfg;
    const Problem p1 = handmade_problem(cfg, {{0, 500, 1e6, 0}, {1, 800, 2e6, 1}, {2, 300, 5e5, 2}});
    cfg.utility_weight = 2.0;
    const Problem p2 = handmade_problem(cfg, {{0, 500, 1e6, 0}, {1, 800, 2e6, 1}, {2, 300, 5e5, 2}});
    Decision d = Decision::all_local(3);
    d.offload[1] = 1;
    d.ratio[1] = 10.0;
    d.capacity[1] = 50e9;
    EXPECT_NEAR(system_utility(p2, d) - system_utility(p1, d), 3.0 * std::log(2.0), 1e-12);
}

TEST(Utility, SeparableAcrossUsers) {
    const SystemConfig cfg;
    const Problem p = handmade_problem(cfg, {{0, 500, 1e6, 0}, {0, 800, 2e6, 1}, {1, 300, 5e5, 2}});
    Decision d = Decision::all_local(3);
    d.offload[0] = 1;
    d.ratio[0] = 5.0;
    d.capacity[0] = 80e9;
    const double before = system_utility(p, d);
    const double u2_before = std::log(accuracy(300.0, p.fit) / p.users[2].local_delay);
    d.offload[2] = 1;
    d.ratio[2] = 20.0;
    d.capacity[2] = 100e9;
    const UserOutcome o = evaluate_user(p, d, 2);
    EXPECT_NEAR(system_utility(p, d) - before, std::log(o.accuracy / o.delay) - u2_before, 1e-12);
}

TEST(Tasks, DrawnFromCatalogAndRange) {
    SystemConfig cfg;
    cfg.rng_seed = 3;
    const auto tasks = generate_tasks(cfg, default_catalog());
    ASSERT_EQ(tasks.size(), cfg.num_users);
    for (const auto& t : tasks) {
        EXPECT_LT(t.task_index, 3u);
        EXPECT_GE(t.raw_volume, cfg.volume_min);
        EXPECT_LE(t.raw_volume, cfg.volume_max);
    }
}

TEST(Constraints, AllLocalIsFeasibleUnderDefaults) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SystemConfig cfg;
        cfg.rng_seed = seed;
        const Problem p = generate_problem(cfg);
        EXPECT_TRUE(check_constraints(p, Decision::all_local(p.num_users())).feasible());
    }
}

TEST(Constraints, RatioBelowOneFlagged) {
    const Problem p = handmade_problem(SystemConfig{}, {{0, 500, 1e7, 2}});
    Decision d = Decision::all_local(1);
    d.offload[0] = 1;
    d.ratio[0] = 0.5;
    d.capacity[0] = 100e9;
    const ConstraintReport rep = check_constraints(p, d);
    EXPECT_FALSE(rep.users[0].c3);
    EXPECT_NEAR(rep.users[0].ratio_residual, 0.5, 1e-15);
    EXPECT_FALSE(rep.feasible());
}

TEST(Constraints, OverBudgetResidual) {
    const SystemConfig cfg;
    const Problem p = handmade_problem(cfg, {{0, 500, 1e7, 2}, {0, 600, 1e7, 2}});
    Decision d = Decision::all_local(2);
    for (std::size_t u = 0; u < 2; ++u) {
        d.offload[u] = 1;
        d.ratio[u] = 2.0;
        d.capacity[u] = 0.505 * cfg.mec_capacity;
    }
    const ConstraintReport rep = check_constraints(p, d);
    EXPECT_FALSE(rep.servers[0].ok);
    EXPECT_NEAR(rep.servers[0].residual, 0.01 * cfg.mec_capacity, 1e-3);
    EXPECT_EQ(rep.violations(), 1u);
}

TEST(Constraints, NonBinaryOffloadFlagged) {
    const Problem p = handmade_problem(SystemConfig{}, {{0, 500, 1e7, 2}});
    Decision d = Decision::all_local(1);
    d.offload[0] = 2;
    const ConstraintReport rep = check_constraints(p, d);
    EXPECT_FALSE(rep.users[0].binary_ok);
    EXPECT_FALSE(rep.users[0].single_ok);
    EXPECT_FALSE(rep.feasible());
}

TEST(Constraints, DeadlineAndAccuracyResiduals) {
    const SystemConfig cfg;
    // task 0: 20 ms, 85 %
    const Problem p = handmade_problem(cfg, {{0, 500, 1e4, 0}});
    Decision d = Decision::all_local(1);
    d.offload[0] = 1;
    d.ratio[0] = 100.0;  // 5 units, below the 85 % floor
    d.capacity[0] = 100e9;
    const ConstraintReport rep = check_constraints(p, d);
    const UserOutcome o = evaluate_user(p, d, 0);
    EXPECT_NEAR(rep.users[0].delay_residual, o.delay - 0.020, 1e-15);
    EXPECT_NEAR(rep.users[0].accuracy_residual, 85.0 - accuracy(5.0, p.fit), 1e-12);
    EXPECT_FALSE(rep.users[0].c5);
}
