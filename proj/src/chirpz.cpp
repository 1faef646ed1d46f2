#include "cdho/chirpz.hpp"

namespace cdho {

template Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1> chirp_z<double>(
    const Eigen::Ref<const Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1>>&, double,
    double, double, double, Eigen::Index, int);
template Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1> direct_sum<double>(
    const Eigen::Ref<const Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1>>&, double,
    double, double, double, Eigen::Index, int);

}  // namespace cdho
