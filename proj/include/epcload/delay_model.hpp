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

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epcload {

enum class Entity : int { UE = 0, eNB, MME, HSS, SGW, PGW };

inline constexpr std::array<Entity, 6> kAllEntities = {Entity::UE,  Entity::eNB, Entity::MME,
                                                       Entity::HSS, Entity::SGW, Entity::PGW};
/// Every entity whose delay contributes to the constant term K.
inline constexpr std::array<Entity, 5> kNonMmeEntities = {Entity::UE, Entity::eNB, Entity::HSS,
                                                          Entity::SGW, Entity::PGW};

std::string_view entity_name(Entity e) noexcept;
/// Accepts "UE", "eNB", "MME", "HSS", "SGW"/"S-GW", "PGW"/"P-GW" (any case).
std::optional<Entity> parse_entity(std::string_view name);

/// Per-bearer cost and capacity of one EPC entity. O and C share units
/// (messages or CPU operations).
struct EntityProfile {
  Entity entity = Entity::MME;
  double ops_per_bearer = 0.0;  // O_X
  double capacity = 0.0;        // C_X, per second
  int messages_per_bearer = 1;

  double service_time() const noexcept { return ops_per_bearer / capacity; }
};

/// At most one profile per entity.
class EpcProfiles {
 public:
  EpcProfiles() = default;
  explicit EpcProfiles(std::span<const EntityProfile> profiles);

  void set(const EntityProfile& p);
  bool has(Entity e) const noexcept;
  /// Throws ConfigError naming the entity when it is missing.
  const EntityProfile& at(Entity e) const;

  /// Copy with C_X multiplied by `multiplier` for every entity in `which`.
  EpcProfiles scaled(double multiplier, std::span<const Entity> which) const;
  EpcProfiles scaled(double multiplier) const { return scaled(multiplier, kAllEntities); }

  /// Entities whose per-bearer time O_X/C_X exceeds the MME's; the delay
  /// model assumes there are none.
  std::vector<std::string> dominance_warnings() const;

 private:
  std::array<std::optional<EntityProfile>, 6> profiles_{};
};

/// K = sum over UE, eNB, HSS, S-GW, P-GW of O_X / C_X. Throws ConfigError
/// when one of them is missing.
double constant_delay_K(const EpcProfiles& profiles);

struct MmeLoad {
  double D = 0.0;    // deterministic MME service time, seconds
  double rho = 0.0;  // lambda_beta * D
};

/// D = O_MME / C_MME and rho = lambda_beta * D. Throws OverloadError when
/// rho >= 1.
MmeLoad mme_load(double lambda_beta, const EntityProfile& mme);

/// Characteristic function of the sojourn-tail decay rate, in units of the
/// service time: the decay rate is gamma = theta / D for the smallest
/// positive zero theta of f(theta, rho).
using Characteristic = std::function<double(double theta, double rho)>;

/// M/D/1-PS characteristic function. With c = theta - rho,
///   f = [theta - rho theta (e^c - 1)/c - rho (1 - rho) e^c] / c,
/// the denominator of the sojourn-time moment generating function
///   E[e^{theta V/D}] = (1 - rho) c e^c / (c f).
/// Its zero is the pole that fixes the exponential tail, and the residue
/// there equals psi_coefficient().
double md1ps_characteristic(double theta, double rho);

/// Decay rate gamma (per second) of the M/D/1-PS sojourn-time tail for
/// arrival rate lambda_beta and service time D. Bisection to relative
/// tolerance 1e-10. Throws OverloadError for rho >= 1 and NumericalError
/// (with the scanned bracket) when no sign change is found.
double solve_gamma(double lambda_beta, double D,
                   const Characteristic& characteristic = md1ps_characteristic);

/// psi = (1-rho)(lambda - gamma) / (2 lambda (1-rho) - gamma rho (2-rho)).
double psi_coefficient(double lambda_beta, double rho, double gamma);

/// Parameters of the tail approximation P(d > tau) = psi exp(-gamma (tau - K)).
struct DelayModelParams {
  double lambda_beta = 0.0;  // per second
  double D = 0.0;            // seconds
  double rho = 0.0;
  double psi = 0.0;
  double gamma = 0.0;        // per second
  double K = 0.0;            // seconds

  /// Offset above K below which the approximation exceeds 1:
  /// max(0, ln(psi) / gamma).
  double tau0() const;
  /// K + tau0(): start of the region where delay_survival is not clamped.
  double validity_threshold() const { return K + tau0(); }
  /// Throws OverloadError unless 0 < rho < 1; DomainError for gamma <= 0,
  /// psi <= 0 or K < 0.
  void validate() const;
};

/// Full parameter set for a request rate and a set of entity profiles.
DelayModelParams build_delay_model(double lambda_beta, const EpcProfiles& profiles,
                                   const Characteristic& characteristic = md1ps_characteristic);

struct SurvivalPoint {
  double probability = 1.0;
  bool clamped = false;  // tau below the validity threshold
};

/// P(d > tau); clamped to 1 (and flagged) below K + tau0. Throws
/// DomainError for tau < 0.
SurvivalPoint delay_survival(double tau, const DelayModelParams& params);

/// tau_p = K + (ln psi - ln(1-p)) / gamma, the inverse of delay_survival.
/// Throws DomainError if p is outside (0,1) or falls in the clamped region.
double delay_percentile(double p, const DelayModelParams& params);

/// Percentile of the delay up to the end of a message prefix of the
/// procedure (e.g. up to data forwarding), taken as `fraction` of the
/// full bearer delay.
double prefix_delay_percentile(double p, const DelayModelParams& params, double fraction);

/// Structured text (JSON) dump of D, rho, psi, gamma, K, tau0.
std::string to_json_text(const DelayModelParams& params);

}  // namespace epcload
