#pragma once

namespace nrucoex::radio {

// InH-Mixed office line-of-sight probability for a 2D distance in meters.
double los_probability(double d2d);

// InH path loss in dB (no shadowing). Distances below 1 m are clamped to 1 m.
double pathloss_los_db(double d3d, double fc_ghz);
double pathloss_nlos_db(double d3d, double fc_ghz);
double pathloss_db(double d3d, double fc_ghz, bool los);

// Log-normal shadowing standard deviation for the InH model.
inline constexpr double kShadowingSigmaLosDb = 3.0;
inline constexpr double kShadowingSigmaNlosDb = 8.03;

double noise_power_dbm(double bandwidth_hz, double noise_figure_db, double noise_psd_dbm_hz = -174.0);

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);
double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace nrucoex::radio
