#include "esrl/envs.hpp"

#include <algorithm>
#include <cmath>

namespace esrl {

namespace {

void check_finite_state(const SimState& s, const char* who) {
  if (!s.x.allFinite() || !s.xdot.allFinite() || !std::isfinite(s.t))
    throw SimulationFault(std::string(who) + ": non-finite state");
}

void check_step_inputs(const SimState& s, const Vec& u, int n, const char* who) {
  if (s.x.size() != n || s.xdot.size() != n || u.size() != n)
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  if (!u.allFinite()) throw SimulationFault(std::string(who) + ": non-finite action");
  check_finite_state(s, who);
}

}  // namespace

// -- Block --------------------------------------------------------------------

void Block2dConfig::validate() const {
  require(block_side > 0.0, "block2d: block_side must be > 0");
  require(slot_clearance >= 0.0 && slot_clearance < block_side,
          "block2d: need 0 <= clearance < block_side");
  require(slot_depth > 0.0 && shoulder_width > 0.0 && wall_base > 0.0,
          "block2d: wall dimensions must be > 0");
  require(mass > 0.0, "block2d: mass must be > 0");
  require(contact_stiffness > 0.0 && contact_damping > 0.0,
          "block2d: contact stiffness and damping must be > 0");
  require(wall_friction >= 0.0, "block2d: friction must be >= 0");
  require(dt > 0.0 && substeps >= 1, "block2d: need dt > 0 and substeps >= 1");
  require(success_depth > 0.0, "block2d: success_depth must be > 0");
}

Vec Block2dConfig::goal() const {
  Vec g(2);
  g << slot_position[0], slot_position[1] - slot_depth + 0.5 * block_side;
  return g;
}

std::vector<Box2> Block2dConfig::obstacles() const {
  const double half_open = 0.5 * (block_side + slot_clearance);
  const double sx = slot_position[0];
  const double top = slot_position[1];
  const double floor = top - slot_depth;
  const double bottom = floor - wall_base;
  return {
      Box2{{sx - half_open - shoulder_width, bottom}, {sx - half_open, top}},
      Box2{{sx + half_open, bottom}, {sx + half_open + shoulder_width, top}},
      Box2{{sx - half_open, bottom}, {sx + half_open, floor}},
  };
}

ContactForce block2d_contact(const Block2dConfig& cfg, const SimState& s) {
  const double h = 0.5 * cfg.block_side;
  ContactForce out;
  for (const Box2& box : cfg.obstacles()) {
    // Penetration if the block were pushed out through each of the four faces.
    const double to_left = (s.x(0) + h) - box.lo[0];
    const double to_right = box.hi[0] - (s.x(0) - h);
    const double to_below = (s.x(1) + h) - box.lo[1];
    const double to_above = box.hi[1] - (s.x(1) - h);
    if (to_left <= 0.0 || to_right <= 0.0 || to_below <= 0.0 || to_above <= 0.0) continue;

    // Minimum translation direction, pointing out of the wall.
    double depth = to_left;
    Vec normal(2);
    normal << -1.0, 0.0;
    if (to_right < depth) { depth = to_right; normal << 1.0, 0.0; }
    if (to_below < depth) { depth = to_below; normal << 0.0, -1.0; }
    if (to_above < depth) { depth = to_above; normal << 0.0, 1.0; }
    Vec tangent(2);
    tangent << -normal(1), normal(0);

    const double vn = s.xdot.dot(normal);
    const double fn = std::max(0.0, cfg.contact_stiffness * depth - cfg.contact_damping * vn);
    const double vt = s.xdot.dot(tangent);
    const double cap = cfg.wall_friction * fn;
    const double ft = -std::clamp(cfg.contact_damping * vt, -cap, cap);

    out.normal += fn * normal;
    out.total += fn * normal + ft * tangent;
    out.spring_energy += 0.5 * cfg.contact_stiffness * depth * depth;
  }
  return out;
}

SimState block2d_step(const Block2dConfig& cfg, const SimState& s, const Vec& u) {
  check_step_inputs(s, u, 2, "block2d_step");
  const ContactForce f = block2d_contact(cfg, s);
  SimState next;
  next.xdot = s.xdot + (cfg.dt / cfg.mass) * (u + f.total);
  next.x = s.x + cfg.dt * next.xdot;
  next.t = s.t + cfg.dt;
  check_finite_state(next, "block2d_step");
  return next;
}

double block2d_insertion_depth(const Block2dConfig& cfg, const SimState& s) {
  const double half_open = 0.5 * (cfg.block_side + cfg.slot_clearance);
  if (std::abs(s.x(0) - cfg.slot_position[0]) >= half_open) return 0.0;
  // Below the slot floor means the block went around the wall, not into it.
  const double floor = cfg.slot_position[1] - cfg.slot_depth;
  if (s.x(1) < floor) return 0.0;
  const double bottom_face = s.x(1) - 0.5 * cfg.block_side;
  return std::max(0.0, cfg.slot_position[1] - bottom_face);
}

bool block2d_success(const Block2dConfig& cfg, const SimState& s) {
  return block2d_insertion_depth(cfg, s) >= cfg.success_depth;
}

Block2dEnv::Block2dEnv(Block2dConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

SimState Block2dEnv::initial_state() const {
  SimState s;
  s.x = Vec(2);
  s.x << cfg_.initial_position[0], cfg_.initial_position[1];
  s.xdot = Vec::Zero(2);
  return s;
}

SimState Block2dEnv::step(const SimState& s, const Vec& u) const {
  return block2d_step(cfg_, s, u);
}

Vec Block2dEnv::external_force(const SimState& s) const {
  return block2d_contact(cfg_, s).total;
}

Mat Block2dEnv::mass_matrix(const Vec& /*x*/) const {
  return cfg_.mass * Mat::Identity(2, 2);
}

bool Block2dEnv::success(const SimState& s) const { return block2d_success(cfg_, s); }

bool Block2dEnv::start_is_free(const Vec& x) const {
  require(x.size() == 2, "block2d: start must be 2-D");
  // Touching is free; rounding in the geometry can leave a sliver of overlap.
  const double h = 0.5 * cfg_.block_side - 1e-9;
  for (const Box2& box : cfg_.obstacles()) {
    const bool overlap = x(0) + h > box.lo[0] && x(0) - h < box.hi[0] &&
                         x(1) + h > box.lo[1] && x(1) - h < box.hi[1];
    if (overlap) return false;
  }
  return true;
}

// -- Arm ----------------------------------------------------------------------

void Arm2Config::validate() const {
  for (int i = 0; i < 2; ++i) {
    require(link_masses[i] > 0.0, "arm2: link masses must be > 0");
    require(link_lengths[i] > 0.0, "arm2: link lengths must be > 0");
    require(link_inertias[i] >= 0.0, "arm2: link inertias must be >= 0");
  }
  require(joint_viscous_friction >= 0.0, "arm2: friction must be >= 0");
  require(dt > 0.0 && substeps >= 1, "arm2: need dt > 0 and substeps >= 1");
  require(goal_tolerance > 0.0, "arm2: goal_tolerance must be > 0");
}

Mat arm2_mass_matrix(const Arm2Config& cfg, const Vec& q) {
  const double m1 = cfg.link_masses[0], m2 = cfg.link_masses[1];
  const double l1 = cfg.link_lengths[0];
  const double lc1 = 0.5 * cfg.link_lengths[0], lc2 = 0.5 * cfg.link_lengths[1];
  const double i1 = cfg.link_inertias[0], i2 = cfg.link_inertias[1];
  const double c2 = std::cos(q(1));
  Mat m(2, 2);
  m(0, 0) = i1 + i2 + m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * c2);
  m(0, 1) = i2 + m2 * (lc2 * lc2 + l1 * lc2 * c2);
  m(1, 0) = m(0, 1);
  m(1, 1) = i2 + m2 * lc2 * lc2;
  return m;
}

Mat arm2_coriolis(const Arm2Config& cfg, const Vec& q, const Vec& qdot) {
  const double h =
      cfg.link_masses[1] * cfg.link_lengths[0] * 0.5 * cfg.link_lengths[1] * std::sin(q(1));
  Mat c(2, 2);
  c << -h * qdot(1), -h * (qdot(0) + qdot(1)),
        h * qdot(0), 0.0;
  return c;
}

Vec arm2_gravity(const Arm2Config& cfg, const Vec& q) {
  const double m1 = cfg.link_masses[0], m2 = cfg.link_masses[1];
  const double l1 = cfg.link_lengths[0];
  const double lc1 = 0.5 * cfg.link_lengths[0], lc2 = 0.5 * cfg.link_lengths[1];
  const double g = cfg.gravity;
  const double c12 = std::cos(q(0) + q(1));
  Vec out(2);
  out << (m1 * lc1 + m2 * l1) * g * std::cos(q(0)) + m2 * lc2 * g * c12, m2 * lc2 * g * c12;
  return out;
}

Vec arm2_dynamics(const Arm2Config& cfg, const Vec& q, const Vec& qdot, const Vec& u,
                  const Vec& f_ext) {
  if (q.size() != 2 || qdot.size() != 2 || u.size() != 2 || f_ext.size() != 2)
    throw std::invalid_argument("arm2_dynamics: dimension mismatch");
  const Mat m = arm2_mass_matrix(cfg, q);
  Vec rhs = u + f_ext - arm2_coriolis(cfg, q, qdot) * qdot - cfg.joint_viscous_friction * qdot;
  if (!cfg.gravity_compensated) rhs -= arm2_gravity(cfg, q);
  const Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("arm2_dynamics: mass matrix is not positive definite");
  return llt.solve(rhs);
}

SimState arm2_step(const Arm2Config& cfg, const SimState& s, const Vec& u) {
  check_step_inputs(s, u, 2, "arm2_step");
  const Vec qdd = arm2_dynamics(cfg, s.x, s.xdot, u, Vec::Zero(2));
  SimState next;
  next.xdot = s.xdot + cfg.dt * qdd;
  next.x = s.x + cfg.dt * next.xdot;
  next.t = s.t + cfg.dt;
  check_finite_state(next, "arm2_step");
  return next;
}

double arm2_kinetic_energy(const Arm2Config& cfg, const SimState& s) {
  return 0.5 * s.xdot.dot(arm2_mass_matrix(cfg, s.x) * s.xdot);
}

Arm2Env::Arm2Env(Arm2Config cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

SimState Arm2Env::initial_state() const {
  SimState s;
  s.x = Vec(2);
  s.x << cfg_.initial_q[0], cfg_.initial_q[1];
  s.xdot = Vec::Zero(2);
  return s;
}

Vec Arm2Env::goal() const {
  Vec g(2);
  g << cfg_.goal_q[0], cfg_.goal_q[1];
  return g;
}

SimState Arm2Env::step(const SimState& s, const Vec& u) const { return arm2_step(cfg_, s, u); }

Vec Arm2Env::external_force(const SimState& /*s*/) const { return Vec::Zero(2); }

Mat Arm2Env::mass_matrix(const Vec& q) const { return arm2_mass_matrix(cfg_, q); }

bool Arm2Env::success(const SimState& s) const {
  return (s.x - goal()).norm() < cfg_.goal_tolerance;
}

}  // namespace esrl
