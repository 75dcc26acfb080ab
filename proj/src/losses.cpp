#include "rcgan/losses.hpp"

#include <cmath>
#include <string>

#include "rcgan/errors.hpp"

namespace rcgan {
namespace losses {

namespace {

// mean((x - target)^2) for one patch map.
Var patch_mse(const Var& map, double target) {
  return ops::mean_all(ops::square(ops::add_const(map, -target)));
}

void check_patch_batch(const std::vector<PatchMapSet>& batch, const char* where) {
  if (batch.empty()) throw std::invalid_argument(std::string(where) + ": empty batch");
  for (const PatchMapSet& s : batch)
    if (s.maps.size() != 3)
      throw ShapeError(std::string(where) + ": expected 3 patch maps, got " +
                       std::to_string(s.maps.size()));
}

}  // namespace

Var generator_adv(const std::vector<PatchMapSet>& fake) {
  check_patch_batch(fake, "generator_adv");
  std::vector<Var> terms;
  terms.reserve(fake.size() * 3);
  for (const PatchMapSet& s : fake)
    for (const Var& m : s.maps) terms.push_back(patch_mse(m, 1.0));
  return ops::scale(ops::add_scalars(terms), 1.0 / (3.0 * static_cast<double>(fake.size())));
}

Var discriminator_adv(const std::vector<PatchMapSet>& real, const std::vector<PatchMapSet>& fake) {
  check_patch_batch(real, "discriminator_adv");
  check_patch_batch(fake, "discriminator_adv");
  if (real.size() != fake.size())
    throw ShapeError("discriminator_adv: real batch " + std::to_string(real.size()) +
                     " vs fake batch " + std::to_string(fake.size()));
  std::vector<Var> terms;
  terms.reserve(real.size() * 6);
  for (std::size_t j = 0; j < real.size(); ++j)
    for (int i = 0; i < 3; ++i) {
      terms.push_back(patch_mse(real[j].maps[static_cast<std::size_t>(i)], 1.0));
      terms.push_back(patch_mse(fake[j].maps[static_cast<std::size_t>(i)], 0.0));
    }
  return ops::scale(ops::add_scalars(terms), 1.0 / (3.0 * static_cast<double>(real.size())));
}

Var cycle(const std::vector<Var>& r_real, const std::vector<Var>& n_real, const ImageFn& g_n,
          const ImageFn& g_r) {
  if (r_real.empty() || n_real.empty()) throw std::invalid_argument("cycle: empty batch");
  if (r_real.size() != n_real.size())
    throw ShapeError("cycle: rain batch " + std::to_string(r_real.size()) + " vs sunny batch " +
                     std::to_string(n_real.size()));
  std::vector<Var> terms;
  terms.reserve(r_real.size() * 2);
  for (std::size_t j = 0; j < r_real.size(); ++j) {
    Var rec_r = g_r(g_n(r_real[j]));
    Var rec_n = g_n(g_r(n_real[j]));
    terms.push_back(ops::mean_all(ops::abs(ops::sub(r_real[j], rec_r))));
    terms.push_back(ops::mean_all(ops::abs(ops::sub(n_real[j], rec_n))));
  }
  return ops::scale(ops::add_scalars(terms), 1.0 / static_cast<double>(r_real.size()));
}

Var feature_identity(const std::vector<Var>& r_real, const MaskFn& rmi, const ImageFn& g_n,
                     const FeatFn& feat, IdentityMode mode) {
  if (r_real.empty()) throw std::invalid_argument("feature_identity: empty batch");
  std::vector<Var> terms;
  terms.reserve(r_real.size());
  for (const Var& r : r_real) {
    Var mask3 = ops::repeat_ch(rmi(r), r.value().channels());
    Var recomposed = ops::add(mask3, g_n(r));
    Var diff = mode == IdentityMode::Pixel
                   ? ops::sub(recomposed, r)
                   : ops::sub(feat(recomposed), feat(r));
    terms.push_back(ops::mean_all(ops::square(diff)));
  }
  return ops::scale(ops::add_scalars(terms), 1.0 / static_cast<double>(r_real.size()));
}

Var mask_identity(const std::vector<Var>& n_real, const MaskFn& rmi, const ImageFn& g_r) {
  if (n_real.empty()) throw std::invalid_argument("mask_identity: empty batch");
  std::vector<Var> clean_terms, sim_terms;
  clean_terms.reserve(n_real.size());
  sim_terms.reserve(n_real.size());
  for (const Var& n : n_real) {
    clean_terms.push_back(ops::mean_all(ops::square(rmi(n))));
    Var simulated = g_r(n);
    Var added = ops::sub(simulated, n);  // the rain that was put in
    Var mask3 = ops::repeat_ch(rmi(simulated), n.value().channels());
    sim_terms.push_back(ops::mean_all(ops::square(ops::sub(mask3, added))));
  }
  const double inv_n = 1.0 / static_cast<double>(n_real.size());
  return ops::add(ops::scale(ops::add_scalars(clean_terms), inv_n),
                  ops::scale(ops::add_scalars(sim_terms), inv_n));
}

namespace {

void check_finite_term(double v, const char* name) {
  if (!std::isfinite(v))
    throw NumericError(std::string("total_loss: term '") + name + "' is not finite");
}

}  // namespace

Var total(const Var& dis, const Var& gen, const Var& cycle_term, const Var& ident_m,
          const Var& ident_f, const LossWeights& w) {
  check_finite_term(dis.scalar(), "dis");
  check_finite_term(gen.scalar(), "gen");
  check_finite_term(cycle_term.scalar(), "cycle");
  check_finite_term(ident_m.scalar(), "ident_m");
  check_finite_term(ident_f.scalar(), "ident_f");
  return ops::add_scalars({ops::scale(dis, w.lambda_d), ops::scale(gen, w.lambda_g),
                           ops::scale(cycle_term, w.lambda_cycle), ops::scale(ident_m, w.lambda_im),
                           ops::scale(ident_f, w.lambda_if)});
}

LossBreakdown breakdown(double dis, double gen, double cycle_term, double ident_m, double ident_f,
                        const LossWeights& w) {
  check_finite_term(dis, "dis");
  check_finite_term(gen, "gen");
  check_finite_term(cycle_term, "cycle");
  check_finite_term(ident_m, "ident_m");
  check_finite_term(ident_f, "ident_f");
  LossBreakdown b;
  b.dis = dis;
  b.gen = gen;
  b.cycle = cycle_term;
  b.ident_m = ident_m;
  b.ident_f = ident_f;
  b.total = w.lambda_d * dis + w.lambda_g * gen + w.lambda_cycle * cycle_term +
            w.lambda_im * ident_m + w.lambda_if * ident_f;
  return b;
}

}  // namespace losses
}  // namespace rcgan
