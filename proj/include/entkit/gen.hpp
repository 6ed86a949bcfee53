#pragma once

#include "entkit/dist.hpp"
#include "entkit/rng.hpp"

namespace entkit {

/// Shared seeded instance generators for the fuzz harness and the test
/// suites. Everything is a pure function of the rng state.

/// Default group menu: Z^2, F2^3, Z/12.
GroupContext sample_ctx(TrialRng& rng);

std::vector<CoordVec> sample_set(TrialRng& rng, const GroupContext& ctx, int min_size,
                                 int max_size, Coord window = 4);

FinDist sample_dist(TrialRng& rng, const GroupContext& ctx, int min_support, int max_support,
                    Coord window = 4);

/// Mass at least 1 - delta0 on one point, the rest spread around it.
FinDist sample_concentrated(TrialRng& rng, const GroupContext& ctx, double delta0,
                            Coord window = 4);

/// Supported on `support` with entropy at least log|support| - slack.
FinDist sample_near_uniform(TrialRng& rng, const std::vector<CoordVec>& support,
                            const GroupContext& ctx, double slack);

}  // namespace entkit
