#pragma once

#include <array>
#include <memory>
#include <vector>

#include "esrl/types.hpp"

namespace esrl {

struct SimState {
  Vec x;
  Vec xdot;
  double t = 0.0;
};

/// Common surface used by rollouts and the stability checks.
///
/// `step` advances one physics tick of length dt(). A rollout's control step
/// spans `substeps()` ticks, with the policy re-evaluated on every tick.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual int dim() const = 0;
  virtual double dt() const = 0;
  virtual int substeps() const { return 1; }
  virtual SimState initial_state() const = 0;
  virtual Vec goal() const = 0;
  virtual SimState step(const SimState& s, const Vec& u) const = 0;
  /// Generalized force the environment exerts during a step from `s`
  /// (contact forces; zero in free space).
  virtual Vec external_force(const SimState& s) const = 0;
  virtual Mat mass_matrix(const Vec& x) const = 0;
  virtual bool success(const SimState& s) const = 0;
  /// True when `x` is admissible as a start state (no initial overlap).
  virtual bool start_is_free(const Vec& x) const { (void)x; return true; }
};

// -- 2D block insertion -------------------------------------------------------

/// Axis-aligned rectangle [lo, hi].
struct Box2 {
  std::array<double, 2> lo{};
  std::array<double, 2> hi{};
};

/// A square block sliding in the plane next to a slotted wall. The wall is
/// three rectangles: a left shoulder, a right shoulder and the slot floor.
/// The slot opening (block_side + slot_clearance wide) is centred on
/// slot_position, whose y coordinate is the wall's top face. The start rests
/// against the left shoulder's outer face, lower than its top, so the block
/// has to climb over the shoulder before it can descend into the slot.
struct Block2dConfig {
  double block_side = 0.050;
  double slot_clearance = 0.002;
  double slot_depth = 0.050;
  std::array<double, 2> slot_position{0.0, 0.0};
  double shoulder_width = 0.100;
  double wall_base = 0.300;  // wall thickness below the slot floor
  double mass = 1.0;
  double contact_stiffness = 5e4;
  double contact_damping = 100.0;
  double wall_friction = 0.3;
  double dt = 1e-3;
  int substeps = 10;
  double success_depth = 0.025;
  std::array<double, 2> initial_position{-0.151, -0.025};

  void validate() const;
  /// Slot bottom: the block centre when fully inserted.
  Vec goal() const;
  std::vector<Box2> obstacles() const;
};

struct ContactForce {
  Vec total = Vec::Zero(2);
  Vec normal = Vec::Zero(2);   // sum of normal (penalty) components
  double spring_energy = 0.0;  // sum of 0.5 k delta^2 over active contacts
};

ContactForce block2d_contact(const Block2dConfig& cfg, const SimState& s);
SimState block2d_step(const Block2dConfig& cfg, const SimState& s, const Vec& u);
/// Depth of the block's leading face below the wall top while it is inside
/// the slot opening; zero otherwise.
double block2d_insertion_depth(const Block2dConfig& cfg, const SimState& s);
bool block2d_success(const Block2dConfig& cfg, const SimState& s);

class Block2dEnv final : public Environment {
 public:
  explicit Block2dEnv(Block2dConfig cfg);

  const Block2dConfig& config() const { return cfg_; }
  int dim() const override { return 2; }
  double dt() const override { return cfg_.dt; }
  int substeps() const override { return cfg_.substeps; }
  SimState initial_state() const override;
  Vec goal() const override { return cfg_.goal(); }
  SimState step(const SimState& s, const Vec& u) const override;
  Vec external_force(const SimState& s) const override;
  Mat mass_matrix(const Vec& x) const override;
  bool success(const SimState& s) const override;
  bool start_is_free(const Vec& x) const override;

 private:
  Block2dConfig cfg_;
};

// -- Planar two-link arm ------------------------------------------------------

/// Planar 2R arm with uniform rod links (centre of mass at mid-link), moving
/// in a vertical plane. Gravity is fully compensated by default so the net
/// gravity term is zero.
struct Arm2Config {
  std::array<double, 2> link_masses{1.0, 1.0};
  std::array<double, 2> link_lengths{0.5, 0.5};
  std::array<double, 2> link_inertias{1.0 * 0.25 / 12.0, 1.0 * 0.25 / 12.0};
  double gravity = 9.81;
  bool gravity_compensated = true;
  double joint_viscous_friction = 0.0;
  double dt = 1e-3;
  int substeps = 1;
  std::array<double, 2> initial_q{0.0, 0.0};
  std::array<double, 2> goal_q{0.5, -0.5};
  double goal_tolerance = 0.01;

  void validate() const;
};

Mat arm2_mass_matrix(const Arm2Config& cfg, const Vec& q);
/// Christoffel-form Coriolis matrix, so that Mdot - 2C is skew-symmetric.
Mat arm2_coriolis(const Arm2Config& cfg, const Vec& q, const Vec& qdot);
Vec arm2_gravity(const Arm2Config& cfg, const Vec& q);
Vec arm2_dynamics(const Arm2Config& cfg, const Vec& q, const Vec& qdot, const Vec& u,
                  const Vec& f_ext);
SimState arm2_step(const Arm2Config& cfg, const SimState& s, const Vec& u);
double arm2_kinetic_energy(const Arm2Config& cfg, const SimState& s);

class Arm2Env final : public Environment {
 public:
  explicit Arm2Env(Arm2Config cfg);

  const Arm2Config& config() const { return cfg_; }
  int dim() const override { return 2; }
  double dt() const override { return cfg_.dt; }
  int substeps() const override { return cfg_.substeps; }
  SimState initial_state() const override;
  Vec goal() const override;
  SimState step(const SimState& s, const Vec& u) const override;
  Vec external_force(const SimState& s) const override;
  Mat mass_matrix(const Vec& q) const override;
  bool success(const SimState& s) const override;

 private:
  Arm2Config cfg_;
};

}  // namespace esrl
