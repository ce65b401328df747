#include "climb/error.hpp"
#include "climb/sim.hpp"

namespace climb {

void ContactModel::validate() const {
  if (!(stiffness > 0.0)) throw Error(Errc::validation_error, "stiffness: must be positive");
  if (!(damping >= 0.0)) throw Error(Errc::validation_error, "damping: must be non-negative");
  if (!(hold_force > 0.0)) throw Error(Errc::validation_error, "hold_force: must be positive");
  if (anchors.size() != attached.size() || normals.size() != attached.size())
    throw Error(Errc::validation_error, "contact: anchors, normals and attachment flags differ in size");
}

void ContactModel::attach(int gripper, const Vec3& anchor, const Vec3& normal) {
  const auto i = static_cast<std::size_t>(gripper);
  if (i >= attached.size()) {
    anchors.resize(i + 1, Vec3::Zero());
    normals.resize(i + 1, Vec3::UnitZ());
    attached.resize(i + 1, false);
  }
  anchors[i] = anchor;
  normals[i] = normal.normalized();
  attached[i] = true;
}

ContactForce contact_force(const ContactModel& contact, int gripper, const Vec3& position, const Vec3& velocity) {
  ContactForce out;
  const auto i = static_cast<std::size_t>(gripper);
  if (i >= contact.attached.size() || !contact.attached[i]) return out;
  out.force = -contact.stiffness * (position - contact.anchors[i]) - contact.damping * velocity;
  out.pull = -out.force.dot(contact.normals[i]);
  out.detach = out.pull > contact.hold_force;
  return out;
}

}  // namespace climb
