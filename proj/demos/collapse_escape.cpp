// Trains Base GRPO and GuAE side by side from a policy that almost always
// picks a wrong action, and prints how the learning signal differs.

#include <cstdio>

#include "guae/grpo_sim.hpp"

int main() {
  auto env = guae::BanditEnv::make(1, 5);
  guae::TrainConfig cfg;
  cfg.steps = 3000;
  const auto init = guae::make_initial_logits(env, guae::InitKind::Wrong, 0.99);

  for (auto v : {guae::EstimatorVariant::BaseGrpo, guae::EstimatorVariant::GuAE}) {
    cfg.estimator.variant = v;
    const auto trace = guae::train(env, cfg, guae::PolicyState(init, 7));
    double abs_adv = 0.0;
    double small = 0.0;
    for (const auto& r : trace.rows) {
      abs_adv += r.mean_abs_adv;
      small += r.p_small_adv_001;
    }
    const auto n = static_cast<double>(trace.rows.size());
    const auto pi = trace.final_policy.probs(0);
    std::printf("%-5s mean|A|=%.4f  P(|A|<0.01)=%.3f  final pi(correct)=%.4f\n",
                std::string(guae::to_string(v)).c_str(), abs_adv / n, small / n, pi[env.target[0]]);
  }
  return 0;
}
