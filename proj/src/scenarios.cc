// Copyright 2026 The bce-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bce/scenarios.h"

#include <algorithm>
#include <functional>

#include "bce/games.h"

namespace bce {

BCEMixture Example1SignalMixture(const MediatorSpace& space) {
  const GameTree& tree = space.tree();
  const BaseGame& g = space.game();
  const int root = tree.StageNodes(0)[0];
  BCEMixture m;
  for (int first = 0; first < 2; ++first) {
    FeedbackRule f{RuleDomain::kReduced, std::vector<int>(tree.NumNodes(), 0)};
    f.choice[root] = g.EncodeJoint(0, {first, 0});
    for (int a = 0; a < 2; ++a) {
      const int child = tree.node(root).children[g.EncodeJoint(0, {a, 0})][0];
      f.choice[child] = g.EncodeJoint(1, {0, a == first ? 0 : 1});
    }
    m.entries.push_back({f, Ratio(1, 2)});
  }
  return m;
}

// ---------------------------------------------------------------------------
// Bargaining.

BargainingParams DeskBargaining() {
  return {{Rational(1), Rational(2)},
          {Ratio(1, 2), Ratio(1, 2)},
          {Ratio(1, 2), Rational(1), Ratio(3, 2), Rational(2)}};
}

void CheckBargaining(const BargainingParams& p) {
  if (p.values.empty() || p.values.size() != p.prior.size()) {
    throw InputError("bargaining: one prior weight per valuation expected");
  }
  Rational total(0), mean(0);
  for (size_t k = 0; k < p.values.size(); ++k) {
    if (sgn(p.values[k]) <= 0) throw InputError("bargaining: valuations must be positive");
    if (k > 0 && p.values[k] <= p.values[k - 1]) {
      throw InputError("bargaining: valuations must be increasing");
    }
    if (sgn(p.prior[k]) <= 0) throw InputError("bargaining: prior must be positive");
    total += p.prior[k];
    mean += p.prior[k] * p.values[k];
  }
  if (total != 1) throw InputError("bargaining: prior must sum to one");
  if (p.offers.empty()) throw InputError("bargaining: no offers");
  for (size_t k = 0; k < p.offers.size(); ++k) {
    if (sgn(p.offers[k]) < 0) throw InputError("bargaining: negative offer");
    if (k > 0 && p.offers[k] <= p.offers[k - 1]) {
      throw InputError("bargaining: offers must be increasing");
    }
  }
  if (p.offers.front() >= p.values.front()) {
    throw InputError("bargaining: no offer below the lowest valuation");
  }
  if (std::find(p.offers.begin(), p.offers.end(), mean) == p.offers.end()) {
    throw InputError("bargaining: E(omega) = " + FormatRational(mean, false) +
                     " is not an offer");
  }
}

BargainingModel::BargainingModel(BargainingParams params)
    : params_(std::move(params)) {
  CheckBargaining(params_);
  for (const Rational& a : params_.offers) {
    if (a < params_.values.front()) low_minus_ = a;
  }
  mean_ = 0;
  for (size_t k = 0; k < params_.values.size(); ++k) {
    mean_ += params_.prior[k] * params_.values[k];
  }
  tree_ = std::make_unique<GameTree>(
      BargainingGame(params_.values, params_.prior, params_.offers));
  space_ = std::make_unique<MediatorSpace>(*tree_, false);
}

int BargainingModel::OfferIndex(const Rational& offer) const {
  auto it = std::find(params_.offers.begin(), params_.offers.end(), offer);
  return it == params_.offers.end()
             ? -1
             : static_cast<int>(it - params_.offers.begin());
}

int BargainingModel::BuyerOffer(int key) const {
  const PlayerKey& k = space_->key(1, key);
  return tree_->PrivateStates(1)[k.pid].signal;
}

namespace {

using OfferFn = std::function<int(int state)>;
using AcceptFn = std::function<int(int offer, int state)>;

FeedbackRule MakeRule(const BargainingModel& model, const OfferFn& f1,
                      const AcceptFn& f2) {
  const GameTree& tree = model.tree();
  const BaseGame& game = tree.game();
  FeedbackRule rule{RuleDomain::kReduced,
                    std::vector<int>(tree.NumNodes(), 0)};
  for (int id = 0; id < tree.NumNodes(); ++id) {
    const Node& n = tree.node(id);
    if (n.stage == 0) {
      rule.choice[id] = game.EncodeJoint(0, {f1(n.state), 0});
    } else {
      const int offer = tree.OwnAction(0, 0, tree.PathAction(id, 0));
      rule.choice[id] = game.EncodeJoint(1, {0, f2(offer, n.state)});
    }
  }
  return rule;
}

}  // namespace

SequentialConstruction BargainingConstruction(const BargainingModel& model,
                                              BargainingVertex vertex,
                                              bool accept_high) {
  const BargainingParams& p = model.params();
  const MediatorSpace& space = model.space();
  const int lm = model.OfferIndex(model.low_minus());
  const int mean = model.OfferIndex(model.mean());
  const Rational& low = p.values.front();
  const Rational& high = p.values.back();
  auto offer = [&](int a) { return p.offers[a]; };
  auto high_offer = [&](int a) { return accept_high && offer(a) > model.mean(); };

  SequentialConstruction c;
  std::function<bool(int)> r1;
  std::function<bool(int, int)> r2;  // (offer, accept)
  std::vector<std::pair<FeedbackRule, Rational>> rules;
  switch (vertex) {
    case BargainingVertex::kSellerLow: {
      c.name = "seller offers omega_L^-";
      r1 = [=](int a) { return a == lm; };
      r2 = [&, high_offer](int a, int acc) {
        if (high_offer(a) || offer(a) < low) return acc == 1;
        return acc == 0;
      };
      rules.push_back({MakeRule(
                           model, [=](int) { return lm; },
                           [&, high_offer](int a, int) {
                             return high_offer(a) || offer(a) < low ? 1 : 0;
                           }),
                       Rational(1)});
      break;
    }
    case BargainingVertex::kFullExtraction: {
      c.name = "full surplus extraction";
      std::vector<int> at_value;
      for (const Rational& w : p.values) {
        const int a = model.OfferIndex(w);
        if (a < 0) {
          throw InputError("full extraction needs every valuation as an offer");
        }
        at_value.push_back(a);
      }
      r1 = [at_value](int a) {
        return std::find(at_value.begin(), at_value.end(), a) != at_value.end();
      };
      r2 = [&, high_offer](int a, int acc) {
        if (high_offer(a) || offer(a) < low) return acc == 1;
        if (offer(a) > high) return acc == 0;
        return true;
      };
      rules.push_back(
          {MakeRule(
               model, [at_value](int w) { return at_value[w]; },
               [&, high_offer](int a, int w) {
                 return high_offer(a) || offer(a) <= p.values[w] ? 1 : 0;
               }),
           Rational(1)});
      break;
    }
    case BargainingVertex::kBuyerIndifferent: {
      c.name = "buyer indifferent at E(omega)";
      r1 = [=](int a) { return a == mean; };
      r2 = [&, high_offer, mean](int a, int acc) {
        if (high_offer(a) || offer(a) < low) return acc == 1;
        if (a == mean) return true;
        return acc == 0;
      };
      const Rational q = model.low_minus() / model.mean();
      for (int accept_mean = 1; accept_mean >= 0; --accept_mean) {
        rules.push_back(
            {MakeRule(
                 model, [=](int) { return mean; },
                 [&, high_offer, mean, accept_mean](int a, int) {
                   if (a == mean) return accept_mean;
                   return high_offer(a) || offer(a) < low ? 1 : 0;
                 }),
             accept_mean ? q : 1 - q});
      }
      break;
    }
  }
  c.range = RangeFromFunction(space, [&](int player, int key) {
    const PlayerKey& k = space.key(player, key);
    if (player == 0) return k.stage != 0 || r1(k.own_rec);
    return k.stage != 1 || r2(model.BuyerOffer(key), k.own_rec);
  });
  for (auto& [rule, w] : rules) {
    if (sgn(w) > 0) c.mixture.entries.push_back({rule, w});
  }
  c.ground = MakeSbceGround(space, c.range);
  c.cps = PessimisticCps(model, c.ground, c.mixture);
  const Plan y = PlanOfMixture(space, c.mixture);
  c.payoff = {Evaluate(space.ObedientValue(1), y),
              Evaluate(space.ObedientValue(0), y)};
  return c;
}

Cps PessimisticCps(const BargainingModel& model, const SbceGround& ground,
                   const BCEMixture& mixture) {
  const GameTree& tree = model.tree();
  const MediatorSpace& space = model.space();
  std::vector<Polynomial> weight;
  for (const FeedbackRule& g : ground.rules) {
    Rational mu(0);
    int distance = -1;
    for (const MixtureEntry& e : mixture.entries) {
      if (e.rule == g) mu += e.weight;
      int d = 0;
      for (int id = 0; id < tree.NumNodes(); ++id) {
        if (g.choice[id] != e.rule.choice[id]) {
          d += tree.node(id).state == 0 ? 1 : 2;
        }
      }
      if (distance < 0 || d < distance) distance = d;
    }
    if (sgn(mu) > 0) {
      weight.push_back({mu});
    } else {
      Polynomial w(3 + distance, Rational(0));
      w.back() = 1;
      weight.push_back(std::move(w));
    }
  }
  auto tremble = [&](int player, int var, int) -> Polynomial {
    if (player == 1) return {0, 1};
    if (tree.node(space.VarNode(var)).state == 0) return {0, 1};
    return {0, 0, 1};
  };
  return TremblingCps(space, ground, weight, tremble);
}

}  // namespace bce
