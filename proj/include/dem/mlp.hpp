#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dem/tape.hpp"
#include "dem/tensor.hpp"

namespace dem {

enum class Activation { Relu, Tanh };

/// Fully connected layer sizes, input to output, e.g. {3,40,40,40,40,40,40,3}.
/// An empty list is the degenerate zero network (no parameters, y == 0).
struct Architecture {
  std::vector<int> layers;
  Activation activation = Activation::Relu;

  int layer_count() const { return layers.empty() ? 0 : static_cast<int>(layers.size()) - 1; }
  std::size_t param_count() const;
  void validate() const;
};

/// All weights and biases as one flat vector with per-layer views. Layout per
/// layer: row-major weight matrix, then bias.
struct NetworkParams {
  Architecture arch;
  std::vector<double> flat;

  static NetworkParams zeros(const Architecture& arch);
  /// Uniform Glorot fan-based init, biases zero, seeded.
  static NetworkParams glorot(const Architecture& arch, std::uint64_t seed);

  std::size_t weight_offset(int layer) const;
  std::size_t bias_offset(int layer) const;
  std::span<double> weight(int layer);
  std::span<const double> weight(int layer) const;
  std::span<double> bias(int layer);
  std::span<const double> bias(int layer) const;
};

/// Raw network output and its spatial Jacobian d y_i / d X_k.
struct NetEval {
  Vec3 y;
  Mat3 jac;
};

NetEval forward_plain(const NetworkParams& params, const Vec3& x);

/// Parameter leaves for one tape evaluation.
struct NetNodes {
  std::vector<ad::NodeId> weights;
  std::vector<ad::NodeId> biases;
};
NetNodes insert_network_leaves(ad::Tape& tape, const NetworkParams& params);
NetNodes insert_network_leaves(ad::Tape& tape, const Architecture& arch,
                               std::span<const double> flat);

struct TapeNet {
  ad::NodeId y;
  ad::NodeId jac;
};

/// Records the forward pass and the layer-wise chain-rule Jacobian on the
/// tape, so both are differentiable with respect to the parameter leaves.
TapeNet record_network(ad::Tape& tape, const NetNodes& nodes, const Architecture& arch,
                       ad::NodeId x);

/// Hard boundary-condition carrier: u = A(X) + B(X) o y. A carries the
/// prescribed displacement, B vanishes componentwise on the essential
/// boundary. grad_a/grad_b return d A_i / d X_k style matrices.
struct BCSpec {
  std::function<Vec3(const Vec3&)> a;
  std::function<Vec3(const Vec3&)> b;
  std::function<Mat3(const Vec3&)> grad_a;
  std::function<Mat3(const Vec3&)> grad_b;

  struct Traction {
    int axis;
    int side;
    Vec3 value;
  };
  std::vector<Traction> tractions;

  struct Essential {
    int axis;
    int side;
    int component;
  };
  std::vector<Essential> essentials;
};

struct AnsatzEval {
  Vec3 u;
  Mat3 grad_u;
};

AnsatzEval apply_ansatz(const Vec3& x, const Vec3& y, const Mat3& jac, const BCSpec& bc);

struct AnsatzNodes {
  ad::NodeId u;
  ad::NodeId grad_u;
};

/// Tape version; the A/B fields and their gradients enter as constants
/// evaluated at the point.
AnsatzNodes apply_ansatz_node(ad::Tape& tape, ad::NodeId a_const, ad::NodeId b_const,
                              ad::NodeId grad_a_const, ad::NodeId grad_b_const, ad::NodeId y,
                              ad::NodeId jac);

// Experiment boundary conditions. The unit cube is [0,1]^3 throughout.

/// u1 prescribed (0 and delta) on the X1 faces, rollers on X2 = 0 and X3 = 0.
BCSpec make_uniaxial_hyper_bc(double delta);
/// Fully prescribed boundary displacement u = (gamma X2, 0, 0).
BCSpec make_shear_bc(double gamma);
/// u1 prescribed on X1 faces, zero normal displacement on all lateral faces.
BCSpec make_visco_strain_bc(double strain);
/// u1 prescribed on X1 faces, rollers on X2 = 0 and X3 = 0, lateral faces free.
BCSpec make_visco_stress_bc(double strain);

}  // namespace dem
