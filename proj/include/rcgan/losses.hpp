#pragma once

#include <functional>
#include <vector>

#include "rcgan/config.hpp"
#include "rcgan/loss_types.hpp"
#include "rcgan/models.hpp"

namespace rcgan {
namespace losses {

// Closures over the networks: an image map (generator with its mask and
// label already bound), a mask map (1-channel output) and a feature map.
using ImageFn = std::function<Var(const Var&)>;
using MaskFn = std::function<Var(const Var&)>;
using FeatFn = std::function<Var(const Var&)>;

// Least-squares adversarial term for the generator side: fake patches are
// pushed towards the all-ones real target. Mean over patch elements, then
// over the 3 scales, then over the batch.
Var generator_adv(const std::vector<PatchMapSet>& fake);

// Least-squares discrimination term: real patches towards 1, fake towards 0.
Var discriminator_adv(const std::vector<PatchMapSet>& real, const std::vector<PatchMapSet>& fake);

// Round-trip reconstruction: mean|r - g_r(g_n(r))| + mean|n - g_n(g_r(n))|,
// averaged over the batch.
Var cycle(const std::vector<Var>& r_real, const std::vector<Var>& n_real, const ImageFn& g_n,
          const ImageFn& g_r);

// Rain-decomposition residual (mask + derained - rain). Pixel mode applies it
// directly; feature mode compares the two sides through the frozen feature
// extractor instead.
Var feature_identity(const std::vector<Var>& r_real, const MaskFn& rmi, const ImageFn& g_n,
                     const FeatFn& feat, IdentityMode mode);

// Mask sanity pair: masks on clean images should vanish, and the mask found
// on a simulated rain image should equal the rain that was added.
Var mask_identity(const std::vector<Var>& n_real, const MaskFn& rmi, const ImageFn& g_r);

// Weighted sum of the five scalar terms. Throws NumericError naming the
// first non-finite term.
Var total(const Var& dis, const Var& gen, const Var& cycle_term, const Var& ident_m,
          const Var& ident_f, const LossWeights& w);

// Scalar-only variant used for logging and tests.
LossBreakdown breakdown(double dis, double gen, double cycle_term, double ident_m, double ident_f,
                        const LossWeights& w);

}  // namespace losses
}  // namespace rcgan
