#pragma once

// Executable property checks shared by `selftest` and the acceptance suite.

#include <cstdint>
#include <string>
#include <vector>

namespace vfo_adr {

struct PropertyResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// ||R^T R - I||_F < 1e-12 and J J^-1 = I within 1e-10 on random admissible attitudes.
PropertyResult check_rotation_jacobian(std::size_t samples = 10000, std::uint64_t seed = 1);

/// Orthogonality of the tangent to both gradients and analytic versus
/// finite-difference gradients, Hessians and tangent rates on both built-in paths.
PropertyResult check_path_geometry(std::size_t samples = 2000, std::uint64_t seed = 2);

/// Observer error-matrix eigenvalues equal -w for each bandwidth.
PropertyResult check_observer_poles(const std::vector<double>& bandwidths = {10.0, 50.0, 200.0});

/// grad s_j . (h*_p - delta_p eps_hat_p - k_p (s1 n1 + s2 n2)) = 0 on random states.
PropertyResult check_field_orthogonality(std::size_t samples = 10000, std::uint64_t seed = 3);

std::vector<PropertyResult> run_property_suite();

}  // namespace vfo_adr
