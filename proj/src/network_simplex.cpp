/*
Copyright 2026 the congested-crowds authors
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "crowd/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "crowd/errors.hpp"

namespace crowd {

namespace {

// Nodes 0..m-1 are sources, m..m+n-1 targets. Every non-root node carries the
// flow of the arc to its parent; the arc's bipartite orientation is implied
// by which endpoint is the source.
class Simplex {
 public:
  Simplex(const std::vector<double>& a, const std::vector<double>& b, const std::vector<double>& c)
      : m_(static_cast<int>(a.size())),
        n_(static_cast<int>(b.size())),
        nodes_(m_ + n_),
        parent_(nodes_, -1),
        pflow_(nodes_, 0.0),
        depth_(nodes_, 0),
        pot_(nodes_, 0.0),
        children_(nodes_) {
    double costScale = 0.0;
    for (double x : c) costScale = std::max(costScale, std::abs(x));
    setCosts(&c, costScale);

    buildNorthwestBasis(a, b);
    recomputePotentials();
  }

  TransportSolution run() {
    const long long pivots = optimize();
    TransportSolution out = extract();
    out.pivots = pivots;
    return out;
  }

  TransportSolution runLexi(const std::vector<double>& primary,
                            const std::vector<double>& secondary) {
    const long long arcCount = static_cast<long long>(m_) * n_;
    const long long p1 = optimize();
    TransportSolution first = extract();

    // Freeze the first-stage optimal face: arcs with strictly positive
    // reduced cost get a secondary cost no optimal basis can afford, so the
    // second stage only rearranges flow among first-stage-optimal plans.
    double s2 = 0.0;
    for (double x : secondary) s2 = std::max(s2, std::abs(x));
    const double faceTol = 1e-11 * std::max(1.0, scale_);
    const double big = 4.0 * (nodes_ + 10) * std::max(1.0, s2);
    stage2_.resize(secondary.size());
    for (long long arc = 0; arc < arcCount; ++arc) {
      const int i = static_cast<int>(arc / n_);
      const int j = static_cast<int>(arc % n_);
      const double rc = primary[arc] - pot_[i] - pot_[m_ + j];
      stage2_[arc] = rc > faceTol ? big : secondary[arc];
    }
    setCosts(&stage2_, s2);
    recomputePotentials();
    const long long p2 = optimize();

    TransportSolution out = extract();
    double planCost = 0.0;
    for (const TransportEntry& e : out.plan) {
      planCost += e.flow * primary[static_cast<long long>(e.i) * n_ + e.j];
    }
    if (std::abs(planCost - first.cost) > 1e-9 * std::max(1.0, std::abs(first.cost))) {
      throw SolveError("transport tie-break left the optimal face (cost drift " +
                       std::to_string(planCost - first.cost) + ")");
    }
    out.cost = planCost;
    out.potentialSource = std::move(first.potentialSource);
    out.potentialTarget = std::move(first.potentialTarget);
    out.minReducedCost = first.minReducedCost;
    out.pivots = p1 + p2;
    return out;
  }

 private:
  void setCosts(const std::vector<double>* c, double scale) {
    cost_ = c;
    scale_ = std::max(1.0, scale);
    pivotTol_ = 1e-13 * scale_;
  }

  double costAt(long long arc) const { return (*cost_)[arc]; }

  long long optimize() {
    const long long arcCount = static_cast<long long>(m_) * n_;
    const int block = std::max(64, static_cast<int>(std::sqrt(static_cast<double>(arcCount))));
    const long long pivotLimit = 1000 + 64LL * nodes_ + arcCount / 4;
    long long pivots = 0;
    long long cursor = 0;
    bool fullPassClean = false;

    while (!fullPassClean) {
      // Block pricing: scan `block` arcs from the cursor, pivot on the most
      // negative reduced cost seen, wrap around until a whole pass is clean.
      long long scanned = 0;
      while (scanned < arcCount) {
        long long bestArc = -1;
        double bestRc = -pivotTol_;
        const long long stop = std::min(static_cast<long long>(block), arcCount - scanned);
        for (long long k = 0; k < stop; ++k) {
          const long long arc = cursor;
          cursor = cursor + 1 == arcCount ? 0 : cursor + 1;
          const int i = static_cast<int>(arc / n_);
          const int j = static_cast<int>(arc % n_);
          const double rc = costAt(arc) - pot_[i] - pot_[m_ + j];
          if (rc < bestRc) {
            bestRc = rc;
            bestArc = arc;
          }
        }
        scanned += stop;
        if (bestArc >= 0) {
          pivot(static_cast<int>(bestArc / n_), static_cast<int>(bestArc % n_));
          if (++pivots > pivotLimit) {
            throw SolveError("transport simplex exceeded pivot limit (" + std::to_string(pivots) + ")");
          }
          scanned = 0;  // restart the clean-pass counter after any pivot
        }
      }
      // A whole pass found nothing below -pivotTol_. Refresh potentials from
      // the tree (they drift by accumulated sigma updates) and accept.
      recomputePotentials();
      fullPassClean = true;
      for (long long arc = 0; arc < arcCount; ++arc) {
        const int i = static_cast<int>(arc / n_);
        const int j = static_cast<int>(arc % n_);
        if (costAt(arc) - pot_[i] - pot_[m_ + j] < -pivotTol_) {
          fullPassClean = false;
          cursor = arc;
          break;
        }
      }
    }
    return pivots;
  }

  TransportSolution extract() const {
    const long long arcCount = static_cast<long long>(m_) * n_;
    TransportSolution out;
    out.potentialSource.assign(pot_.begin(), pot_.begin() + m_);
    out.potentialTarget.assign(pot_.begin() + m_, pot_.end());
    double cost = 0.0;
    for (int w = 0; w < nodes_; ++w) {
      if (parent_[w] < 0 || pflow_[w] <= 0.0) continue;
      const auto [i, j] = arcOf(w);
      cost += pflow_[w] * costAt(static_cast<long long>(i) * n_ + j);
      out.plan.push_back({i, j, pflow_[w]});
    }
    out.cost = cost;
    double minRc = 0.0;
    for (long long arc = 0; arc < arcCount; ++arc) {
      const int i = static_cast<int>(arc / n_);
      const int j = static_cast<int>(arc % n_);
      minRc = std::min(minRc, costAt(arc) - pot_[i] - pot_[m_ + j]);
    }
    out.minReducedCost = minRc;
    return out;
  }

  std::pair<int, int> arcOf(int w) const {
    // Arc between w and parent_[w] in bipartite (source, target) order.
    if (w < m_) return {w, parent_[w] - m_};
    return {parent_[w], w - m_};
  }

  void link(int child, int par, double flow) {
    parent_[child] = par;
    pflow_[child] = flow;
    depth_[child] = depth_[par] + 1;
    children_[par].push_back(child);
  }

  void buildNorthwestBasis(std::vector<double> a, std::vector<double> b) {
    int i = 0, j = 0;
    double ra = a[0], rb = b[0];
    parent_[0] = -1;
    depth_[0] = 0;
    // First arc (0,0) attaches target 0 under source 0.
    {
      const double f = std::min(ra, rb);
      link(m_ + 0, 0, f);
      ra -= f;
      rb -= f;
    }
    while (i < m_ - 1 || j < n_ - 1) {
      const bool advanceSource = j == n_ - 1 || (i < m_ - 1 && ra <= rb);
      if (advanceSource) {
        // New source i+1 hangs below target j; with ra == rb this is the
        // degenerate zero arc, pointing up at the root as required.
        ++i;
        ra = a[i];
        const double f = std::min(ra, rb);
        link(i, m_ + j, f);
        ra -= f;
        rb -= f;
      } else {
        ++j;
        rb = b[j];
        const double f = std::min(ra, rb);
        link(m_ + j, i, f);
        ra -= f;
        rb -= f;
      }
    }
  }

  void recomputePotentials() {
    // pot[i] + pot[m+j] = c(i,j) on every basic arc, root pinned at 0.
    pot_[0] = 0.0;
    stack_.clear();
    stack_.push_back(0);
    while (!stack_.empty()) {
      const int w = stack_.back();
      stack_.pop_back();
      for (int ch : children_[w]) {
        const auto [i, j] = arcOf(ch);
        pot_[ch] = costAt(static_cast<long long>(i) * n_ + j) - pot_[w];
        stack_.push_back(ch);
      }
    }
  }

  void pivot(int ei, int ej) {
    const int src = ei;
    const int tgt = m_ + ej;
    const double enterCost = costAt(static_cast<long long>(ei) * n_ + ej);
    const double sigma = enterCost - pot_[src] - pot_[tgt];

    // Collect both tree paths up to the common apex.
    int x = src, y = tgt;
    iPath_.clear();
    jPath_.clear();
    while (x != y) {
      if (depth_[x] >= depth_[y]) {
        iPath_.push_back(x);
        x = parent_[x];
      } else {
        jPath_.push_back(y);
        y = parent_[y];
      }
    }

    // Bottleneck over backward arcs. Walking up from the entering source,
    // source-side parent arcs are traversed against their orientation; on the
    // target side it is the target nodes' parent arcs.
    double delta = std::numeric_limits<double>::infinity();
    for (int w : iPath_) {
      if (w < m_) delta = std::min(delta, pflow_[w]);
    }
    for (int w : jPath_) {
      if (w >= m_) delta = std::min(delta, pflow_[w]);
    }

    // Leaving arc: last blocking arc along the cycle apex -> src -> tgt ->
    // apex. The src-side walk is stored bottom-up, so scan it reversed.
    int leave = -1;
    for (auto it = iPath_.rbegin(); it != iPath_.rend(); ++it) {
      if (*it < m_ && pflow_[*it] == delta) leave = *it;
    }
    for (int w : jPath_) {
      if (w >= m_ && pflow_[w] == delta) leave = w;
    }
    if (leave < 0) throw SolveError("transport simplex: unbounded pivot (no blocking arc)");

    // Push delta around the cycle.
    for (int w : iPath_) pflow_[w] += w < m_ ? -delta : delta;
    for (int w : jPath_) pflow_[w] += w >= m_ ? -delta : delta;

    // Reverse parent pointers from the entering endpoint inside the detached
    // subtree down to the leaving arc, then attach under the other endpoint.
    const bool leaveOnSourceSide =
        std::find(iPath_.begin(), iPath_.end(), leave) != iPath_.end();
    const int subRoot = leaveOnSourceSide ? src : tgt;
    const int newParent = leaveOnSourceSide ? tgt : src;

    int w = subRoot;
    int prev = -1;
    double prevFlow = delta;
    while (true) {
      const int p = parent_[w];
      const double f = pflow_[w];
      parent_[w] = prev;
      if (prev >= 0) {
        children_[w].erase(std::find(children_[w].begin(), children_[w].end(), prev));
        children_[prev].push_back(w);
        pflow_[w] = prevFlow;
      }
      if (w == leave) {
        children_[p].erase(std::find(children_[p].begin(), children_[p].end(), w));
        break;
      }
      prev = w;
      prevFlow = f;
      w = p;
    }
    parent_[subRoot] = newParent;
    pflow_[subRoot] = delta;
    children_[newParent].push_back(subRoot);

    // Depths and potentials of the moved subtree; sigma keeps the entering
    // arc tight and preserves tightness inside.
    stack_.clear();
    stack_.push_back(subRoot);
    const bool rootIsSource = subRoot < m_;
    while (!stack_.empty()) {
      const int v = stack_.back();
      stack_.pop_back();
      depth_[v] = depth_[parent_[v]] + 1;
      const bool sameClass = (v < m_) == rootIsSource;
      pot_[v] += sameClass ? sigma : -sigma;
      for (int ch : children_[v]) stack_.push_back(ch);
    }
  }

  int m_, n_, nodes_;
  const std::vector<double>* cost_ = nullptr;
  std::vector<int> parent_;
  std::vector<double> pflow_;
  std::vector<int> depth_;
  std::vector<double> pot_;
  std::vector<std::vector<int>> children_;
  std::vector<double> stage2_;
  std::vector<int> iPath_, jPath_, stack_;
  double pivotTol_ = 0.0;
  double scale_ = 1.0;
};

}  // namespace

namespace {

void validateTransportInputs(const std::vector<double>& supply,
                             const std::vector<double>& demand,
                             const std::vector<double>& costMatrix) {
  const std::size_t m = supply.size();
  const std::size_t n = demand.size();
  if (m == 0 || n == 0) throw InputError("transport: empty marginal");
  if (costMatrix.size() != m * n) {
    throw InputError("transport: cost matrix shape mismatch");
  }
  double sa = 0.0, sb = 0.0;
  for (double x : supply) {
    if (!(x >= 0.0)) throw InputError("transport: negative supply");
    sa += x;
  }
  for (double x : demand) {
    if (!(x >= 0.0)) throw InputError("transport: negative demand");
    sb += x;
  }
  if (std::abs(sa - sb) > 1e-9 * std::max({sa, sb, 1e-30})) {
    throw InputError("transport: unbalanced marginals");
  }
  if (!(sa > 0.0)) throw InputError("transport: zero total mass");
}

}  // namespace

TransportSolution solveDenseTransport(const std::vector<double>& supply,
                                      const std::vector<double>& demand,
                                      const std::vector<double>& costMatrix) {
  validateTransportInputs(supply, demand, costMatrix);
  Simplex simplex(supply, demand, costMatrix);
  return simplex.run();
}

TransportSolution solveDenseTransportLexi(const std::vector<double>& supply,
                                          const std::vector<double>& demand,
                                          const std::vector<double>& costMatrix,
                                          const std::vector<double>& secondaryCost) {
  validateTransportInputs(supply, demand, costMatrix);
  if (secondaryCost.size() != costMatrix.size()) {
    throw InputError("transport: secondary cost shape mismatch");
  }
  Simplex simplex(supply, demand, costMatrix);
  return simplex.runLexi(costMatrix, secondaryCost);
}

}  // namespace crowd
