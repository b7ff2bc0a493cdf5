#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace effkern {

// Spatial movement of one component. custom_kernel carries explicit
// transform samples (s, value), even in s; values between samples are
// linearly interpolated, beyond the last sample the end value is held.
struct TransportTerm {
    enum class Kind { none, diffusion, custom_kernel };
    Kind kind = Kind::none;
    double d = 0.0; // diffusivity, >= 0
    std::vector<std::pair<double, double>> samples;

    static TransportTerm make_none() { return {}; }
    static TransportTerm make_diffusion(double d) {
        return {Kind::diffusion, d, {}};
    }
};

// One directed edge of the local network: `gain` feeds row(target),
// col(source). A ring range couples through the distance-l ring kernel
// instead of pointwise.
struct InteractionEntry {
    std::string source;
    std::string target;
    double gain = 0.0;
    std::optional<double> ring_l; // engaged when the range is ring(l)
};

struct NetworkSpec {
    std::vector<std::string> components;   // declaration order fixes indexing
    std::vector<TransportTerm> transport;  // one per component
    std::vector<InteractionEntry> interactions;
    int dimension_default = 1;
    std::string notes;

    int size() const { return static_cast<int>(components.size()); }
    int index_of(std::string_view name) const; // -1 when absent

    // Dense matrix of the purely local gains (ring entries excluded).
    Eigen::MatrixXd local_matrix() const;
    // diag of diffusivities (0 for none / custom transports).
    Eigen::VectorXd diffusivities() const;
};

struct ValidationIssue {
    std::string location;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> errors;
    std::vector<ValidationIssue> warnings;
    bool ok() const { return errors.empty(); }
};

// Thrown by parse_network on malformed input; carries 1-based line/column.
class ParseError : public std::runtime_error {
  public:
    ParseError(int line, int col, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", col " +
                             std::to_string(col) + ": " + what),
          line_(line), col_(col) {}
    int line() const { return line_; }
    int col() const { return col_; }

  private:
    int line_;
    int col_;
};

// Parse the network config format (see README for the grammar). Rejects
// unknown keys, undeclared component references, negative diffusivities
// and nonpositive ring distances.
NetworkSpec parse_network(std::string_view text);

// Inverse of parse_network up to formatting; round-trips bit-exactly.
std::string serialize_network(const NetworkSpec& spec);

ValidationReport validate(const NetworkSpec& spec);

// Preset instances with the reference parameterizations:
//   activator_inhibitor, three_node, pigment, pigment_k1_zero,
//   proneural, proneural_salt_pepper
// Throws std::invalid_argument for unknown names.
NetworkSpec builtin_preset(std::string_view name);
std::vector<std::string> preset_names();

} // namespace effkern
