#ifndef BGMP_TYPES_HPP
#define BGMP_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>

namespace bgmp {

using Matrix  = Eigen::MatrixXd;
using Vector  = Eigen::VectorXd;
using Support = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;
using Index   = Eigen::Index;

} // namespace bgmp

#endif // BGMP_TYPES_HPP
