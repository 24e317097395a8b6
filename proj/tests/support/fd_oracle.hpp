#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "corepo/dpo.hpp"
#include "corepo/policy.hpp"

// Finite-difference gradient oracle: differentiates the pair loss
// numerically, entry by entry, through fresh perturbed copies of the
// policy. Shares nothing with the analytic derivation.

namespace fd {

inline corepo::GradTable fd_grad(const corepo::ToyPolicy& policy,
                                 const corepo::ToyPolicy& reference,
                                 const std::vector<int>& winner, const std::vector<int>& loser,
                                 const corepo::DpoConfig& cfg, double h = 1e-5) {
  // The loss only depends on logit rows the two sequences visit.
  corepo::GradTable touched = policy.grad_log_prob(winner);
  for (const auto& [ctx, g] : policy.grad_log_prob(loser))
    touched.try_emplace(ctx, std::vector<double>(g.size(), 0.0));

  corepo::GradTable out;
  for (const auto& [ctx, g] : touched) {
    std::vector<double> row(g.size(), 0.0);
    for (std::size_t j = 0; j < g.size(); ++j) {
      auto loss_at = [&](double delta) {
        corepo::ToyPolicy p = policy;
        p.row(ctx)[j] += delta;
        return corepo::dpo_loss(corepo::pair_logprobs(p, reference, winner, loser), cfg);
      };
      row[j] = (loss_at(h) - loss_at(-h)) / (2.0 * h);
    }
    out[ctx] = std::move(row);
  }
  return out;
}

// Relative error with an absolute floor so entries that analytically cancel
// to zero compare against finite-difference noise fairly.
inline double max_rel_error(const corepo::GradTable& analytic, const corepo::GradTable& numeric,
                            double floor = 1e-5) {
  double worst = 0.0;
  corepo::GradTable all = analytic;
  for (const auto& [ctx, g] : numeric)
    all.try_emplace(ctx, std::vector<double>(g.size(), 0.0));
  for (const auto& [ctx, g] : all) {
    auto za = std::vector<double>(g.size(), 0.0);
    auto a_it = analytic.find(ctx);
    auto n_it = numeric.find(ctx);
    const auto& av = a_it != analytic.end() ? a_it->second : za;
    const auto& nv = n_it != numeric.end() ? n_it->second : za;
    for (std::size_t j = 0; j < g.size(); ++j) {
      double denom = std::max({std::abs(av[j]), std::abs(nv[j]), floor});
      double err = std::abs(av[j] - nv[j]) / denom;
      if (err > worst) worst = err;
    }
  }
  return worst;
}

struct RandomInstance {
  corepo::ToyPolicy policy;
  corepo::ToyPolicy reference;
  std::vector<int> winner;
  std::vector<int> loser;
  corepo::DpoConfig cfg;
};

inline RandomInstance random_instance(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> logit(-2.0, 2.0);
  std::uniform_real_distribution<double> beta(0.05, 0.5);

  int vocab_size = 3 + (int)(rng() % 3);
  int order = 1 + (int)(rng() % 2);
  std::vector<std::string> vocab;
  for (int i = 0; i < vocab_size; ++i) vocab.push_back("t" + std::to_string(i));

  RandomInstance inst{corepo::ToyPolicy(vocab, order), corepo::ToyPolicy(vocab, order), {}, {},
                      {}};

  auto random_seq = [&] {
    int len = 2 + (int)(rng() % 3);
    std::vector<int> seq;
    for (int i = 0; i < len; ++i) seq.push_back((int)(rng() % vocab_size));
    return seq;
  };
  inst.winner = random_seq();
  do {
    inst.loser = random_seq();
  } while (inst.loser == inst.winner);

  // Randomize every row the pair will visit, in both policies.
  for (const auto* seq : {&inst.winner, &inst.loser}) {
    for (std::size_t t = 0; t < seq->size(); ++t) {
      auto ctx = inst.policy.context_at(*seq, t);
      for (int j = 0; j < vocab_size; ++j) {
        inst.policy.row(ctx)[j] = logit(rng);
        inst.reference.row(ctx)[j] = logit(rng);
      }
    }
  }

  inst.cfg.beta = beta(rng);
  inst.cfg.learning_rate = 0.1;
  return inst;
}

}  // namespace fd
