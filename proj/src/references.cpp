#include "optstop/references.hpp"

namespace optstop {

namespace {

// sigma, x0, T, N, V_train, LS_train, V_test, LS_test
constexpr PutReference kPut[] = {
    {0.2, 85, 1, 50, 15.304, 15.291, 15.285, 15.268},
    {0.2, 90, 1, 50, 11.477, 11.449, 11.482, 11.458},
    {0.2, 100, 1, 50, 6.058, 6.046, 6.068, 6.049},
    {0.2, 110, 1, 50, 2.968, 2.963, 2.979, 2.968},
    {0.4, 85, 1, 50, 20.819, 20.808, 20.849, 20.823},
    {0.4, 90, 1, 50, 18.104, 18.091, 18.129, 18.101},
    {0.4, 100, 1, 50, 13.603, 13.605, 13.618, 13.609},
    {0.4, 110, 1, 50, 10.168, 10.160, 10.172, 10.166},
    {0.2, 85, 1, 100, 15.282, 15.280, 15.301, 15.279},
    {0.2, 90, 1, 100, 11.493, 11.469, 11.476, 11.442},
    {0.2, 100, 1, 100, 6.076, 6.056, 6.081, 6.063},
    {0.2, 110, 1, 100, 2.965, 2.955, 2.994, 2.982},
    {0.2, 85, 2, 50, 15.909, 15.889, 15.918, 15.871},
    {0.2, 90, 2, 50, 12.565, 12.532, 12.573, 12.528},
    {0.2, 100, 2, 50, 7.677, 7.655, 7.685, 7.663},
    {0.2, 110, 2, 50, 4.605, 4.592, 4.615, 4.599},
    {0.4, 85, 2, 50, 24.256, 24.240, 24.283, 24.251},
    {0.4, 90, 2, 50, 21.901, 21.896, 21.943, 21.913},
    {0.4, 100, 2, 50, 17.920, 17.895, 17.949, 17.917},
    {0.4, 110, 2, 50, 14.687, 14.666, 14.692, 14.681},
};

// D, x0, V_test (four features), V_test (raw + reward), V_test (raw),
// neural-network lower bound, published neural-network value
constexpr MaxCallReference kMaxCallSymmetric[] = {
    {2, 90, 8.019, 7.971, 7.993, 8.054, 8.072},
    {2, 100, 13.793, 13.656, 13.751, 13.874, 13.895},
    {2, 110, 21.154, 20.877, 20.969, 21.319, 21.353},
    {3, 90, 11.195, 11.070, 11.111, 11.260, 11.290},
    {3, 100, 18.522, 18.220, 18.258, 18.672, 18.690},
    {3, 110, 27.407, 26.755, 26.856, 27.550, 27.564},
    {5, 90, 16.528, 16.203, 16.208, 16.605, 16.648},
    {5, 100, 26.061, 25.350, 25.408, 26.105, 26.156},
    {5, 110, 36.693, 35.648, 35.681, 36.722, 36.766},
    {10, 90, 26.196, 25.554, 25.444, 26.151, 26.208},
    {10, 100, 38.288, 37.389, 37.268, 38.201, 38.321},
    {10, 110, 50.837, 49.753, 49.559, 50.722, 50.857},
    {20, 90, 37.792, 37.117, 36.420, 37.625, 37.701},
    {20, 100, 51.670, 50.890, 49.990, 51.479, 51.571},
    {20, 110, 65.632, 64.709, 63.703, 65.412, 65.494},
    {30, 90, 44.963, 44.356, 43.255, 44.723, 44.797},
    {30, 100, 59.671, 58.952, 57.729, 59.408, 59.498},
    {30, 110, 74.417, 73.548, 72.071, 74.134, 74.221},
    {50, 90, 54.109, 53.555, 52.620, 53.857, 53.903},
    {50, 100, 69.820, 69.201, 68.026, 69.550, 69.582},
    {50, 110, 85.562, 84.800, 83.442, 85.211, 85.229},
    {100, 90, 66.617, 66.136, 65.327, 66.297, 66.342},
    {100, 100, 83.699, 83.139, 82.148, 83.317, 83.380},
    {100, 110, 100.766, 100.119, 98.969, 100.323, 100.420},
    {200, 90, 79.270, 78.824, 78.127, 78.906, 78.993},
    {200, 100, 97.742, 97.236, 96.371, 97.293, 97.405},
    {200, 110, 116.201, 115.639, 114.615, 115.734, 115.800},
    {500, 90, 96.247, 95.869, 95.253, 95.877, 95.956},
    {500, 100, 116.577, 116.141, 115.400, 116.146, 116.235},
    {500, 110, 136.899, 136.426, 135.547, 136.420, 136.547},
};

// D, x0, V_test (four features), V_test (raw + reward), V_test (raw),
// neural-network lower bound, published neural-network value
constexpr MaxCallReference kMaxCallAsymmetric[] = {
    {2, 90, 14.238, 14.250, 14.249, 14.300, 14.325},
    {2, 100, 19.621, 19.581, 19.570, 19.757, 19.802},
    {2, 110, 26.908, 26.679, 26.697, 27.105, 27.170},
    {3, 90, 18.819, 18.793, 18.804, 19.052, 19.093},
    {3, 100, 26.275, 26.144, 26.100, 26.642, 26.680},
    {3, 110, 35.197, 34.799, 34.678, 35.802, 35.842},
    {5, 90, 27.305, 26.905, 26.884, 27.609, 27.662},
    {5, 100, 37.572, 36.928, 36.934, 37.940, 37.976},
    {5, 110, 48.871, 48.017, 47.897, 49.415, 49.485},
    {10, 90, 85.261, 84.040, 83.629, 85.785, 85.937},
    {10, 100, 103.863, 102.261, 101.891, 104.514, 104.692},
    {10, 110, 122.792, 120.962, 120.466, 123.535, 123.668},
    {20, 90, 125.618, 124.065, 123.247, 125.842, 125.916},
    {20, 100, 149.111, 147.089, 146.430, 149.477, 149.587},
    {20, 110, 172.795, 170.594, 169.598, 173.197, 173.262},
    {30, 90, 154.332, 152.650, 151.680, 154.401, 154.486},
    {30, 100, 181.175, 179.132, 178.130, 181.352, 181.275},
    {30, 110, 207.971, 205.629, 204.414, 208.219, 208.223},
    {50, 90, 196.072, 194.132, 192.847, 196.093, 195.918},
    {50, 100, 227.595, 225.321, 223.934, 227.557, 227.386},
    {50, 110, 259.080, 256.832, 255.048, 258.910, 258.813},
    {100, 90, 263.572, 261.600, 259.958, 263.226, 263.193},
    {100, 100, 302.515, 300.279, 298.497, 302.020, 302.090},
    {100, 110, 341.400, 338.705, 336.870, 340.899, 340.763},
    {200, 90, 344.970, 342.817, 341.324, 344.424, 344.575},
    {200, 100, 393.009, 390.694, 388.815, 392.052, 392.193},
    {200, 110, 440.833, 438.116, 436.314, 440.115, 440.037},
    {500, 90, 477.134, 474.916, 473.289, 475.735, 476.293},
    {500, 100, 539.693, 537.467, 535.441, 538.375, 538.748},
    {500, 110, 602.314, 599.585, 597.590, 600.599, 601.261},
};

// D, x0, V_test, single-tree lower bound, published single-tree value
constexpr BarrierReference kBarrier[] = {
    {4, 90, 34.744, 34.332, 34.300},
    {4, 100, 43.253, 43.216, 43.080},
    {4, 110, 49.462, 49.333, 49.380},
    {8, 90, 45.554, 45.481, 45.400},
    {8, 100, 51.467, 51.313, 51.280},
    {8, 110, 54.521, 54.518, 54.520},
    {16, 90, 51.904, 51.790, 51.850},
    {16, 100, 54.608, 54.610, 54.620},
    {16, 110, 55.965, 55.976, 56.000},
};

}  // namespace

std::span<const PutReference> put_references() { return kPut; }

std::span<const MaxCallReference> max_call_references(bool symmetric) {
  if (symmetric) return kMaxCallSymmetric;
  return kMaxCallAsymmetric;
}

std::span<const BarrierReference> barrier_references() { return kBarrier; }

}  // namespace optstop
