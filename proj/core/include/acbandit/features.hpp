#pragma once

#include "acbandit/types.hpp"

namespace acb {

// Feature maps shared by the critic and the policy.  Every environment in
// the suite uses the same structure: the policy feature prepends an
// intercept to the context, g(s) = [1, s]; the reward feature stacks a
// main-effect block and an action-interaction block,
// f(s, a) = [1, s, a, a*s].  Alternative maps are a config extension point.
struct FeatureMaps {
  Index context_dim = 3;

  Index p() const { return context_dim + 1; }      // policy feature length
  Index k() const { return 2 * (context_dim + 1); }  // reward feature length

  Vec policy(const Vec& s) const {
    Vec g(p());
    g(0) = 1.0;
    g.tail(context_dim) = s;
    return g;
  }

  Vec reward(const Vec& s, int action) const {
    Vec f(k());
    const double a = static_cast<double>(action);
    f(0) = 1.0;
    f.segment(1, context_dim) = s;
    f(context_dim + 1) = a;
    f.tail(context_dim) = a * s;
    return f;
  }

  /// f(s,1) - f(s,0): the treatment-contrast feature [0.., 1, s].
  Vec reward_diff(const Vec& s) const {
    Vec d = Vec::Zero(k());
    d(context_dim + 1) = 1.0;
    d.tail(context_dim) = s;
    return d;
  }
};

}  // namespace acb
