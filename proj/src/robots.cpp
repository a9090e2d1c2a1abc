#include "densnav/robots.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>
#include <stdexcept>

namespace densnav {

Mat2 TwoLinkArm::mass_matrix(const Vec2& q) const {
  const double c2 = std::cos(q.y());
  Mat2 M;
  M(0, 0) = (m1 + m2) * l1 * l1 + m2 * l2 * l2 + 2.0 * m2 * l1 * l2 * c2;
  M(0, 1) = m2 * l2 * l2 + m2 * l1 * l2 * c2;
  M(1, 0) = M(0, 1);
  M(1, 1) = m2 * l2 * l2;
  return M;
}

Vec2 TwoLinkArm::bias_torques(const Vec2& q, const Vec2& qdot) const {
  const double s2 = std::sin(q.y());
  const double c1 = std::cos(q.x());
  const double c12 = std::cos(q.x() + q.y());
  Vec2 H;
  H.x() = -m2 * l1 * l2 * s2 * (2.0 * qdot.x() * qdot.y() + qdot.y() * qdot.y()) +
          (m1 + m2) * g * l1 * c1 + m2 * g * l2 * c12;
  H.y() = m2 * l1 * l2 * s2 * qdot.x() * qdot.x() + m2 * g * l2 * c12;
  return H;
}

Vec2 TwoLinkArm::dynamics(const Vec2& q, const Vec2& qdot, const Vec2& torque) const {
  const Mat2 M = mass_matrix(q);
  const double det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  const Vec2 rhs = torque - bias_torques(q, qdot);
  return Vec2(M(1, 1) * rhs.x() - M(0, 1) * rhs.y(), -M(1, 0) * rhs.x() + M(0, 0) * rhs.y()) / det;
}

TwoLinkArm::FK TwoLinkArm::forward_kinematics(const Vec2& q) const {
  FK fk;
  fk.elbow = Vec2(l1 * std::cos(q.x()), l1 * std::sin(q.x()));
  fk.ee = fk.elbow + Vec2(l2 * std::cos(q.x() + q.y()), l2 * std::sin(q.x() + q.y()));
  return fk;
}

std::optional<Vec2> TwoLinkArm::inverse_kinematics(const Vec2& p, bool elbow_down) const {
  const double d2 = p.squaredNorm();
  double c2 = (d2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  if (c2 > 1.0 + 1e-9 || c2 < -1.0 - 1e-9) return std::nullopt;
  c2 = std::clamp(c2, -1.0, 1.0);
  const double q2 = elbow_down ? -std::acos(c2) : std::acos(c2);
  const double q1 =
      std::atan2(p.y(), p.x()) - std::atan2(l2 * std::sin(q2), l1 + l2 * std::cos(q2));
  return Vec2(q1, q2);
}

double TwoLinkArm::kinetic_energy(const Vec2& q, const Vec2& qdot) const {
  return 0.5 * qdot.dot(mass_matrix(q) * qdot);
}

DensityField JointDensitySpec::make_field() const {
  std::vector<ObstacleSpec> obs;
  obs.reserve(obstacles.size());
  for (const auto& jo : obstacles) {
    ObstacleSpec o;
    o.shape.theta = theta;
    o.shape.r = jo.radius;
    o.shape.s = jo.sensing > jo.radius ? jo.sensing : jo.radius * 1.8;
    o.center = Path2::fixed(jo.center);
    obs.push_back(std::move(o));
  }
  DistanceFn dist;
  dist.kind = DistanceKind::kJointCosine;
  dist.target = target;
  dist.kappa = kappa;
  return DensityField(FieldMode::kDynamicTarget, std::move(obs), std::move(dist), alpha, beta,
                      /*wrap_displacement=*/true);
}

namespace {

Vec2 plan_interp(const std::vector<Vec2>& v, double t0, double dt, double t) {
  if (v.empty()) return Vec2::Zero();
  const double s = (t - t0) / dt;
  if (s <= 0.0) return v.front();
  const auto n = static_cast<double>(v.size() - 1);
  if (s >= n) return v.back();
  const auto i = static_cast<size_t>(s);
  const double w = s - static_cast<double>(i);
  return v[i] * (1.0 - w) + v[i + 1] * w;
}

}  // namespace

Vec2 MotionPlan::sample_q(double t) const { return plan_interp(q, t0, dt, t); }
Vec2 MotionPlan::sample_qdot(double t) const { return plan_interp(qdot, t0, dt, t); }
Vec2 MotionPlan::sample_qddot(double t) const { return plan_interp(qddot, t0, dt, t); }

MotionPlan joint_motion_plan(const JointDensitySpec& spec, const Vec2& q0, double t0, double t1,
                             double dt) {
  const DensityField field = spec.make_field();
  auto flow = [&field](double t, const Vec2& q) {
    return field.beta() * field.rho_grad(t, q) + field.target_velocity(t);
  };
  auto check = [&](double t, const Vec2& q, const Vec2& qd) {
    for (const auto& o : field.obstacles()) {
      const Vec2 u = wrap_angles(q - o.center.position(t));
      const double dist = u.norm();
      if (dist < o.shape.r) {
        std::ostringstream msg;
        msg << "joint_motion_plan: plan entered an obstacle region at t=" << t;
        throw std::runtime_error(msg.str());
      }
      // At the theta plateau the bump gradient vanishes; inward motion there
      // means the flow is about to cross into the exclusion radius.
      const double tau =
          (dist * dist - o.shape.r * o.shape.r) / (o.shape.s * o.shape.s - o.shape.r * o.shape.r);
      if (tau <= kTauUnderflow && dist > 1e-12 && qd.dot(u / dist) < 0.0) {
        std::ostringstream msg;
        msg << "joint_motion_plan: plan at occupancy floor with inward motion at t=" << t;
        throw std::runtime_error(msg.str());
      }
    }
  };

  MotionPlan plan;
  plan.t0 = t0;
  plan.dt = dt;
  const int n = static_cast<int>(std::ceil((t1 - t0) / dt));
  plan.q.reserve(static_cast<size_t>(n) + 1);
  plan.qdot.reserve(static_cast<size_t>(n) + 1);

  Vec2 q = q0;
  for (int i = 0; i <= n; ++i) {
    const double t = t0 + dt * i;
    const Vec2 qd = flow(t, q);
    check(t, q, qd);
    plan.q.push_back(q);
    plan.qdot.push_back(qd);
    if (i == n) break;
    const Vec2 k1 = qd;
    const Vec2 k2 = flow(t + 0.5 * dt, q + 0.5 * dt * k1);
    const Vec2 k3 = flow(t + 0.5 * dt, q + 0.5 * dt * k2);
    const Vec2 k4 = flow(t + dt, q + dt * k3);
    q += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  // qddot: central differences of the flow samples, then a 5-sample moving
  // average to keep the inverse-dynamics feedforward smooth.
  const size_t m = plan.qdot.size();
  std::vector<Vec2> raw(m, Vec2::Zero());
  for (size_t i = 0; i < m; ++i) {
    if (i == 0)
      raw[i] = (plan.qdot[1] - plan.qdot[0]) / dt;
    else if (i + 1 == m)
      raw[i] = (plan.qdot[m - 1] - plan.qdot[m - 2]) / dt;
    else
      raw[i] = (plan.qdot[i + 1] - plan.qdot[i - 1]) / (2.0 * dt);
  }
  plan.qddot.resize(m, Vec2::Zero());
  for (size_t i = 0; i < m; ++i) {
    Vec2 acc = Vec2::Zero();
    int cnt = 0;
    for (int w = -2; w <= 2; ++w) {
      const auto k = static_cast<long>(i) + w;
      if (k < 0 || k >= static_cast<long>(m)) continue;
      acc += raw[static_cast<size_t>(k)];
      ++cnt;
    }
    plan.qddot[i] = acc / cnt;
  }
  return plan;
}

namespace {

double segment_point_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 < 1e-18) return (p - a).norm();
  const double u = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + u * ab)).norm();
}

// Minimal enclosing circle (Welzl, move-to-front randomized incremental).
struct Circle {
  Vec2 c = Vec2::Zero();
  double r = 0.0;
  bool contains(const Vec2& p) const { return (p - c).norm() <= r + 1e-9; }
};

Circle circle_from(const Vec2& a, const Vec2& b) {
  Circle out;
  out.c = 0.5 * (a + b);
  out.r = 0.5 * (a - b).norm();
  return out;
}

Circle circle_from(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double ax = a.x(), ay = a.y(), bx = b.x(), by = b.y(), cx = c.x(), cy = c.y();
  const double d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
  if (std::abs(d) < 1e-14) {
    // Degenerate (collinear): fall back to the widest pair.
    Circle c1 = circle_from(a, b), c2 = circle_from(a, c), c3 = circle_from(b, c);
    Circle best = c1;
    if (c2.r > best.r) best = c2;
    if (c3.r > best.r) best = c3;
    return best;
  }
  const double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2s = cx * cx + cy * cy;
  Circle out;
  out.c.x() = (a2 * (by - cy) + b2 * (cy - ay) + c2s * (ay - by)) / d;
  out.c.y() = (a2 * (cx - bx) + b2 * (ax - cx) + c2s * (bx - ax)) / d;
  out.r = (a - out.c).norm();
  return out;
}

Circle minimal_enclosing_circle(std::vector<Vec2> pts, std::mt19937_64& rng) {
  std::shuffle(pts.begin(), pts.end(), rng);
  Circle mec;
  if (pts.empty()) return mec;
  mec = {pts[0], 0.0};
  for (size_t i = 1; i < pts.size(); ++i) {
    if (mec.contains(pts[i])) continue;
    mec = {pts[i], 0.0};
    for (size_t j = 0; j < i; ++j) {
      if (mec.contains(pts[j])) continue;
      mec = circle_from(pts[i], pts[j]);
      for (size_t k = 0; k < j; ++k) {
        if (mec.contains(pts[k])) continue;
        mec = circle_from(pts[i], pts[j], pts[k]);
      }
    }
  }
  return mec;
}

bool config_collides(const TwoLinkArm& arm, const std::vector<Disc>& task_obstacles,
                     const Vec2& q) {
  const auto fk = arm.forward_kinematics(q);
  for (const auto& d : task_obstacles) {
    if (segment_point_distance(Vec2::Zero(), fk.elbow, d.center) <= d.radius) return true;
    if (segment_point_distance(fk.elbow, fk.ee, d.center) <= d.radius) return true;
  }
  return false;
}

// Colliding components are typically long curved bands in joint space; a
// single enclosing circle of such a band would swallow most of the torus.
// Split along the principal axis until each piece has a tight circle.
void split_and_enclose(std::vector<Vec2>& pts, double radius_cap, std::mt19937_64& rng,
                       std::vector<Disc>& out) {
  const Circle mec = minimal_enclosing_circle(pts, rng);
  if (mec.r <= radius_cap || pts.size() < 8) {
    out.push_back({wrap_angles(mec.c), mec.r});
    return;
  }
  Vec2 mean = Vec2::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : pts) {
    const Vec2 d = p - mean;
    sxx += d.x() * d.x();
    sxy += d.x() * d.y();
    syy += d.y() * d.y();
  }
  // Leading eigenvector of the 2x2 covariance.
  const double tr = sxx + syy, det = sxx * syy - sxy * sxy;
  const double lam = 0.5 * tr + std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  Vec2 axis(sxy, lam - sxx);
  if (axis.norm() < 1e-12) axis = Vec2(1.0, 0.0);
  axis.normalize();
  std::vector<Vec2> lo, hi;
  for (const auto& p : pts) ((p - mean).dot(axis) < 0.0 ? lo : hi).push_back(p);
  if (lo.empty() || hi.empty()) {
    out.push_back({wrap_angles(mec.c), mec.r});
    return;
  }
  pts.clear();
  pts.shrink_to_fit();
  split_and_enclose(lo, radius_cap, rng, out);
  split_and_enclose(hi, radius_cap, rng, out);
}

}  // namespace

std::vector<Disc> workspace_to_joint_obstacles(const TwoLinkArm& arm,
                                               const std::vector<Disc>& task_obstacles,
                                               int grid_n, double radius_cap) {
  const double h = 2.0 * kPi / grid_n;
  std::vector<uint8_t> hit(static_cast<size_t>(grid_n) * grid_n, 0);
  size_t hit_count = 0;
  auto q_at = [&](int i, int j) { return Vec2(-kPi + h * i, -kPi + h * j); };
  for (int i = 0; i < grid_n; ++i)
    for (int j = 0; j < grid_n; ++j)
      if (config_collides(arm, task_obstacles, q_at(i, j))) {
        hit[static_cast<size_t>(i) * grid_n + j] = 1;
        ++hit_count;
      }
  if (hit_count == static_cast<size_t>(grid_n) * grid_n)
    throw std::runtime_error("workspace_to_joint_obstacles: every configuration collides");

  // Connected components on the torus; BFS carries unwrapped coordinates so a
  // component crossing the +-pi seam stays contiguous.
  std::vector<uint8_t> seen(hit.size(), 0);
  std::vector<Disc> out;
  std::mt19937_64 rng(12345);
  for (int i0 = 0; i0 < grid_n; ++i0) {
    for (int j0 = 0; j0 < grid_n; ++j0) {
      const size_t idx0 = static_cast<size_t>(i0) * grid_n + j0;
      if (!hit[idx0] || seen[idx0]) continue;
      std::vector<Vec2> pts;
      struct Node {
        int i, j;
        Vec2 q;
      };
      std::deque<Node> queue;
      queue.push_back({i0, j0, q_at(i0, j0)});
      seen[idx0] = 1;
      while (!queue.empty()) {
        const Node nd = queue.front();
        queue.pop_front();
        pts.push_back(nd.q);
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          const int ni = ((nd.i + di[d]) % grid_n + grid_n) % grid_n;
          const int nj = ((nd.j + dj[d]) % grid_n + grid_n) % grid_n;
          const size_t nidx = static_cast<size_t>(ni) * grid_n + nj;
          if (!hit[nidx] || seen[nidx]) continue;
          seen[nidx] = 1;
          queue.push_back({ni, nj, nd.q + Vec2(h * di[d], h * dj[d])});
        }
      }
      std::vector<Disc> circles;
      split_and_enclose(pts, radius_cap, rng, circles);
      for (auto& d : circles) {
        d.radius *= 1.1;  // conservative inflation
        out.push_back(d);
      }
    }
  }
  return out;
}

double joint_obstacle_coverage(const TwoLinkArm& arm, const std::vector<Disc>& task_obstacles,
                               const std::vector<Disc>& joint_circles, int grid_n) {
  const double h = 2.0 * kPi / grid_n;
  size_t colliding = 0, covered = 0;
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      const Vec2 q(-kPi + h * i, -kPi + h * j);
      if (!config_collides(arm, task_obstacles, q)) continue;
      ++colliding;
      for (const auto& c : joint_circles) {
        if (wrap_angles(q - c.center).norm() <= c.radius) {
          ++covered;
          break;
        }
      }
    }
  }
  if (colliding == 0) return 1.0;
  return static_cast<double>(covered) / static_cast<double>(colliding);
}

}  // namespace densnav
