#pragma once

#include <vector>

// Interpolant norms of sin(2 pi x) under Matern 0 on interior grids of
// [-1, 1], and the increment norms paired with the finer fill distance.
namespace sin_trace {

inline const std::vector<double> h{
    0.166666666666667,  0.125,              0.0909090909090909, 0.0645161290322581,
    0.0476190476190476, 0.0344827586206897, 0.0253164556962025, 0.0185185185185185,
    0.0136054421768707, 0.01};

inline const std::vector<double> norms{
    3.82415899623798, 3.95916375231754, 4.09264813972677, 4.20694408971636, 4.28321193822703,
    4.34323517872238, 4.38512461664145, 4.41604047967603, 4.43824484773144, 4.454441294808};

inline const std::vector<double> increment_h{
    0.125,              0.0909090909090909, 0.0645161290322581, 0.0476190476190476,
    0.0344827586206897, 0.0253164556962025, 0.0185185185185185, 0.0136054421768707,
    0.01};

inline const std::vector<double> increments{
    1.02507833318103,  1.03672135983779,  0.973966004740607, 0.804689961271504,
    0.719574394987134, 0.604670228953936, 0.521627850735037, 0.443400282225249,
    0.379512740861311};

inline const std::vector<int> grid_sizes{11, 15, 21, 30, 41, 57, 78, 107, 146, 199};

}  // namespace sin_trace
