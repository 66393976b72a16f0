// Copyright 2026 The epcload Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "epcload/delay_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "epcload/errors.hpp"
#include "epcload/roots.hpp"
#include <json.hpp>

namespace epcload {
namespace {

std::size_t index_of(Entity e) { return static_cast<std::size_t>(e); }

void require_stable(double rho, const char* where) {
  if (!(rho < 1.0)) {
    std::ostringstream msg;
    msg << where << ": MME load rho=" << rho
        << " >= 1; capacity multiplier must exceed " << rho;
    throw OverloadError(rho, msg.str());
  }
}

/// theta > 1 with theta - ln(theta) = rho - ln(rho); the sojourn-time
/// MGF of a tagged job alone diverges there, so the pole lies below it.
double mgf_divergence_bound(double rho) {
  const double level = rho - std::log(rho);
  return bisect([level](double t) { return t - std::log(t) - level; }, 1.0, 2.0 * level + 2.0,
                1e-14);
}

}  // namespace

std::string_view entity_name(Entity e) noexcept {
  switch (e) {
    case Entity::UE: return "UE";
    case Entity::eNB: return "eNB";
    case Entity::MME: return "MME";
    case Entity::HSS: return "HSS";
    case Entity::SGW: return "S-GW";
    case Entity::PGW: return "P-GW";
  }
  return "?";
}

std::optional<Entity> parse_entity(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c != '-' && c != '_') key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  if (key == "UE") return Entity::UE;
  if (key == "ENB") return Entity::eNB;
  if (key == "MME") return Entity::MME;
  if (key == "HSS") return Entity::HSS;
  if (key == "SGW") return Entity::SGW;
  if (key == "PGW") return Entity::PGW;
  return std::nullopt;
}

EpcProfiles::EpcProfiles(std::span<const EntityProfile> profiles) {
  for (const auto& p : profiles) set(p);
}

void EpcProfiles::set(const EntityProfile& p) {
  if (!(p.ops_per_bearer > 0.0) || !(p.capacity > 0.0)) {
    throw ConfigError(std::string("entity ") + std::string(entity_name(p.entity)) +
                      ": ops_per_bearer and capacity must be > 0");
  }
  if (p.messages_per_bearer < 1) {
    throw ConfigError(std::string("entity ") + std::string(entity_name(p.entity)) +
                      ": messages_per_bearer must be >= 1");
  }
  profiles_[index_of(p.entity)] = p;
}

bool EpcProfiles::has(Entity e) const noexcept { return profiles_[index_of(e)].has_value(); }

const EntityProfile& EpcProfiles::at(Entity e) const {
  const auto& p = profiles_[index_of(e)];
  if (!p) throw ConfigError("missing profile for entity " + std::string(entity_name(e)));
  return *p;
}

EpcProfiles EpcProfiles::scaled(double multiplier, std::span<const Entity> which) const {
  if (!(multiplier > 0.0)) throw DomainError("capacity multiplier must be positive");
  EpcProfiles out = *this;
  for (Entity e : which) {
    if (auto& p = out.profiles_[index_of(e)]) p->capacity *= multiplier;
  }
  return out;
}

std::vector<std::string> EpcProfiles::dominance_warnings() const {
  std::vector<std::string> out;
  if (!has(Entity::MME)) return out;
  const double mme = at(Entity::MME).service_time();
  for (Entity e : kNonMmeEntities) {
    if (has(e) && at(e).service_time() > mme) {
      std::ostringstream msg;
      msg << entity_name(e) << " per-bearer time " << at(e).service_time()
          << " s exceeds the MME's " << mme << " s; the MME is not the bottleneck";
      out.push_back(msg.str());
    }
  }
  return out;
}

double constant_delay_K(const EpcProfiles& profiles) {
  double k = 0.0;
  for (Entity e : kNonMmeEntities) k += profiles.at(e).service_time();
  return k;
}

MmeLoad mme_load(double lambda_beta, const EntityProfile& mme) {
  if (!(lambda_beta > 0.0)) throw DomainError("mme_load: lambda_beta must be positive");
  MmeLoad load;
  load.D = mme.service_time();
  load.rho = lambda_beta * load.D;
  require_stable(load.rho, "mme_load");
  return load;
}

double md1ps_characteristic(double theta, double rho) {
  const double c = theta - rho;
  if (std::abs(c) < 1e-6) {
    return (1.0 - 2.0 * rho + 0.5 * rho * rho) + c * (-rho + rho * rho / 3.0);
  }
  const double g = theta - rho * theta * std::expm1(c) / c - rho * (1.0 - rho) * std::exp(c);
  return g / c;
}

double solve_gamma(double lambda_beta, double D, const Characteristic& characteristic) {
  if (!(lambda_beta > 0.0) || !(D > 0.0)) {
    throw DomainError("solve_gamma: lambda_beta and D must be positive");
  }
  const double rho = lambda_beta * D;
  require_stable(rho, "solve_gamma");
  auto f = [&](double theta) { return characteristic(theta, rho); };

  // Scan for the first sign change above 0, then bisect inside it.
  double hi_limit = mgf_divergence_bound(rho);
  constexpr int kSteps = 256;
  double lo = std::min(hi_limit * 1e-9, (1.0 - rho) * 1e-3);
  double flo = f(lo);
  for (int round = 0; round < 8; ++round) {
    const double step = (hi_limit - lo) / kSteps;
    for (int i = 1; i <= kSteps; ++i) {
      const double hi = lo + step;
      const double fhi = f(hi);
      if (std::signbit(fhi) != std::signbit(flo) || fhi == 0.0) {
        const double theta = bisect(f, lo, hi, 1e-10);
        return theta / D;
      }
      lo = hi;
      flo = fhi;
    }
    hi_limit *= 2.0;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "solve_gamma: no sign change of the characteristic function on (0, " << lo
      << "] for rho=" << rho << "; f(" << lo << ")=" << flo;
  throw NumericalError(msg.str());
}

double psi_coefficient(double lambda_beta, double rho, double gamma) {
  require_stable(rho, "psi_coefficient");
  const double den = 2.0 * lambda_beta * (1.0 - rho) - gamma * rho * (2.0 - rho);
  if (den == 0.0 || !std::isfinite(den)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "psi_coefficient: zero denominator for lambda_beta=" << lambda_beta << ", rho=" << rho
        << ", gamma=" << gamma;
    throw NumericalError(msg.str());
  }
  return (1.0 - rho) * (lambda_beta - gamma) / den;
}

double DelayModelParams::tau0() const { return std::max(0.0, std::log(psi) / gamma); }

void DelayModelParams::validate() const {
  if (!(rho > 0.0)) throw DomainError("delay model: rho must be positive");
  require_stable(rho, "delay model");
  if (!(gamma > 0.0)) throw DomainError("delay model: gamma must be positive");
  if (!(psi > 0.0)) throw DomainError("delay model: psi must be positive");
  if (!(K >= 0.0)) throw DomainError("delay model: K must be >= 0");
}

DelayModelParams build_delay_model(double lambda_beta, const EpcProfiles& profiles,
                                   const Characteristic& characteristic) {
  DelayModelParams p;
  p.lambda_beta = lambda_beta;
  p.K = constant_delay_K(profiles);
  const auto load = mme_load(lambda_beta, profiles.at(Entity::MME));
  p.D = load.D;
  p.rho = load.rho;
  p.gamma = solve_gamma(lambda_beta, p.D, characteristic);
  p.psi = psi_coefficient(lambda_beta, p.rho, p.gamma);
  p.validate();
  return p;
}

SurvivalPoint delay_survival(double tau, const DelayModelParams& params) {
  if (!(tau >= 0.0)) throw DomainError("delay_survival: tau must be >= 0");
  params.validate();
  if (tau < params.validity_threshold()) return {1.0, true};
  return {std::min(1.0, params.psi * std::exp(-params.gamma * (tau - params.K))), false};
}

double delay_percentile(double p, const DelayModelParams& params) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("delay_percentile: p must lie in (0, 1)");
  params.validate();
  if (1.0 - p > params.psi) {
    std::ostringstream msg;
    msg << "delay_percentile: p=" << p << " lies below the tail-approximation region (psi="
        << params.psi << "); estimate this percentile by simulation";
    throw DomainError(msg.str());
  }
  return params.K + (std::log(params.psi) - std::log1p(-p)) / params.gamma;
}

double prefix_delay_percentile(double p, const DelayModelParams& params, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw DomainError("prefix_delay_percentile: fraction must lie in (0, 1]");
  }
  return fraction * delay_percentile(p, params);
}

std::string to_json_text(const DelayModelParams& params) {
  nlohmann::ordered_json j;
  j["lambda_beta"] = params.lambda_beta;
  j["D"] = params.D;
  j["rho"] = params.rho;
  j["psi"] = params.psi;
  j["gamma"] = params.gamma;
  j["K"] = params.K;
  j["tau0"] = params.tau0();
  return j.dump(2);
}

}  // namespace epcload
