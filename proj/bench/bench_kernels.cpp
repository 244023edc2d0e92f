// OpenMP kernels against their serial references. Run with
// OMP_NUM_THREADS set to compare thread counts.

#include "csal/kernels.hpp"
#include "csal/mixture.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace csal;

namespace {

constexpr int kDim = 4;
constexpr int kK = 5;

Eigen::MatrixXd random_points(long n, long d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(n, d);
  for (long i = 0; i < n; ++i)
    for (long c = 0; c < d; ++c) x(i, c) = z(rng);
  return x;
}

std::vector<FactoredComponent> components() {
  MixtureParams p;
  p.alpha = Eigen::VectorXd::Constant(kK, 1.0 / kK);
  p.mu = random_points(kK, kDim, 2);
  for (int l = 0; l < kK; ++l) {
    const Eigen::MatrixXd a = random_points(kDim, kDim, 10 + l);
    p.sigma.push_back(a * a.transpose() + Eigen::MatrixXd::Identity(kDim, kDim));
  }
  return factor(p);
}

std::vector<int> labels(long n) {
  std::vector<int> h(n);
  for (long i = 0; i < n; ++i) h[i] = static_cast<int>(i % kK);
  return h;
}

template <auto Kernel>
void BM_distances(benchmark::State& state) {
  const auto x = random_points(state.range(0), kDim, 1);
  const auto c = random_points(kK, kDim, 2);
  Eigen::MatrixXd out;
  for (auto _ : state) {
    Kernel(x, c, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_nearest(benchmark::State& state) {
  const auto x = random_points(state.range(0), kDim, 1);
  const auto c = random_points(kK, kDim, 2);
  std::vector<int> a;
  Eigen::VectorXd d;
  for (auto _ : state) {
    Kernel(x, c, a, d);
    benchmark::DoNotOptimize(d.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_log_joint(benchmark::State& state) {
  const auto x = random_points(state.range(0), kDim, 1);
  const auto comps = components();
  Eigen::MatrixXd out;
  for (auto _ : state) {
    Kernel(x, comps, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_fcm(benchmark::State& state) {
  const auto x = random_points(state.range(0), kDim, 1);
  const auto c = random_points(kK, kDim, 2);
  Eigen::MatrixXd out;
  for (auto _ : state) {
    Kernel(x, c, 2.0, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// Quadratic in n, so a smaller range.
template <auto Kernel>
void BM_distance_sums(benchmark::State& state) {
  const auto x = random_points(state.range(0), kDim, 1);
  const auto h = labels(state.range(0));
  Eigen::MatrixXd out;
  for (auto _ : state) {
    Kernel(x, h, kK, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

}  // namespace

BENCHMARK(BM_distances<kernels::squared_distances>)->Name("squared_distances/parallel")->Range(1 << 10, 1 << 18);
BENCHMARK(BM_distances<kernels::serial::squared_distances>)->Name("squared_distances/serial")->Range(1 << 10, 1 << 18);
BENCHMARK(BM_nearest<kernels::nearest_center>)->Name("nearest_center/parallel")->Range(1 << 10, 1 << 18);
BENCHMARK(BM_nearest<kernels::serial::nearest_center>)->Name("nearest_center/serial")->Range(1 << 10, 1 << 18);
BENCHMARK(BM_log_joint<kernels::log_joint>)->Name("log_joint/parallel")->Range(1 << 10, 1 << 18);
BENCHMARK(BM_log_joint<kernels::serial::log_joint>)->Name("log_joint/serial")->Range(1 << 10, 1 << 18);
BENCHMARK(BM_fcm<kernels::fcm_memberships>)->Name("fcm_memberships/parallel")->Range(1 << 10, 1 << 18);
BENCHMARK(BM_fcm<kernels::serial::fcm_memberships>)->Name("fcm_memberships/serial")->Range(1 << 10, 1 << 18);
BENCHMARK(BM_distance_sums<kernels::cluster_distance_sums>)->Name("cluster_distance_sums/parallel")->Range(128, 4096);
BENCHMARK(BM_distance_sums<kernels::serial::cluster_distance_sums>)->Name("cluster_distance_sums/serial")->Range(128, 4096);

BENCHMARK_MAIN();
