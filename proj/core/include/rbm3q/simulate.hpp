#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rbm3q/model.hpp"

namespace rbm3q {

struct SimConfig {
  double h = 1e-3;        // Euler step
  double horizon = 2e4;   // T
  double burn_in = 1e3;
  std::uint64_t seed = 1;
  int replicas = 8;
  Vec2 start{1.0, 1.0};
  std::size_t record_stride = 1;  // PathRecord keeps every stride-th step
  bool override_recurrence = false;

  // width of the diagonal occupation strip |z2 - z1| < sqrt(2)*strip_eps
  double strip_eps() const { return 4.0 * std::sqrt(h); }
  // offset of the shifted strips in the normal-difference estimator
  double fd_delta() const { return 8.0 * std::sqrt(h); }

  std::size_t n_steps() const { return static_cast<std::size_t>(horizon / h); }
};

struct StepSample {
  double t = 0.0;
  Vec2 z;        // state after the step
  double dL1 = 0.0;
  double dL2 = 0.0;
};

struct StepResult {
  Vec2 z;
  double dL1 = 0.0;
  double dL2 = 0.0;
};

// Deterministic per-replica stream: splitmix64(seed, replica) -> mt19937_64,
// normals by Box-Muller (independent of libstdc++ distribution internals).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t replica);
  double normal();
  double uniform();

 private:
  std::uint64_t s_;
  bool have_spare_ = false;
  double spare_ = 0.0;
  std::uint64_t next_u64();
};

bool in_domain(const Vec2& z);  // z1 >= 0 or z2 >= 0

// One constrained Euler step from state with Gaussian increment xi (iid
// standard normals, correlated internally via the Cholesky factor of Sigma).
// Throws StuckAtCorner if the push-back loop fails to terminate.
StepResult step_rbm(const ModelParams& p, const Vec2& state, const Vec2& xi,
                    double h);

struct PathRecord {
  std::vector<StepSample> samples;  // strided
  double L1_total = 0.0;
  double L2_total = 0.0;
  double t_end = 0.0;
  std::size_t n_steps = 0;
};

// Streaming interface; on_step sees every step in order.
using StepSink = std::function<void(const StepSample&)>;

void simulate_stream(const ModelParams& p, const SimConfig& cfg, int replica,
                     const StepSink& sink);

// Records a path (strided samples plus local-time totals) for one replica.
PathRecord simulate_path(const ModelParams& p, const SimConfig& cfg,
                         int replica = 0);

// Fold across the diagonal: the state is sorted so it lies in S1 and
// dL1_hat = dL1 + dL2. The diagonal local time increment is the discrete
// Tanaka term of v = z2 - z1 (v_prev is v before the step):
//   dL2_hat = |v| - |v_prev| - sgn(v_prev) (v - v_prev),
// which is nonzero exactly when the step crosses the diagonal and makes
// the folded semimartingale decomposition hold step by step.
StepSample hat_step(const StepSample& s, double v_prev);
// Quadrant process: (z1,z2) -> (-z1+z2, z2) applied to a folded sample;
// local times carry over (horizontal axis <- dL1_hat, vertical <- dL2_hat).
StepSample tilde_step(const StepSample& s_hat);

PathRecord transform_hat(const PathRecord& path);
PathRecord transform_tilde(const PathRecord& path_hat);

}  // namespace rbm3q
