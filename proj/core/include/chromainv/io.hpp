#pragma once

#include "chromainv/column.hpp"
#include "chromainv/dataset.hpp"
#include "chromainv/normalization.hpp"
#include "chromainv/training.hpp"

#include <filesystem>
#include <string>

namespace chromainv {

/// Number formatting used by every CSV writer: 9 significant digits.
std::string format_number(double value);

/// CSV with header `t,response`.
void write_chromatogram_csv(const std::filesystem::path& path, const Chromatogram& chromatogram);
Chromatogram read_chromatogram_csv(const std::filesystem::path& path);

/// CSV with header `t,c1,c2`.
void write_outlet_csv(const std::filesystem::path& path, const OutletSeries& outlet);

/// Dataset directory layout:
///
///   meta.json    column and detector settings, seed, N_T, counts, time grid,
///                per-sample origins, column order
///   samples.f64  row-major little-endian float64 matrix, one row per sample:
///                r_1..r_NT, hbar_1, hbar_2, y_1..y_8 (NaN targets when absent)
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& dir);

/// Stable 64-bit hash (hex) of every sample's response, injection, target
/// and origin.
std::string dataset_fingerprint(const Dataset& dataset);

/// JSON with "mean" and "stddev" arrays of length N_T + 2.
void save_norm_stats(const std::filesystem::path& path, const NormStats& stats);
NormStats load_norm_stats(const std::filesystem::path& path);

/// Model file (see to_json(FnnModel)); the embedded NormStats fingerprint
/// ties it to the statistics it was trained with.
void save_model(const std::filesystem::path& path, const FnnModel& model, const NormStats& stats);
/// Loads a model and checks that `stats` carries the fingerprint it was
/// trained with.
FnnModel load_model(const std::filesystem::path& path, const NormStats& stats);

/// CSV with header `epoch,loss,data_term,train_r2,val_r2`.
void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history);

/// CSV with header `hidden,loss,activation,alpha_b,alpha_w,train_r2,val_r2`.
void write_grid_csv(const std::filesystem::path& path, const std::vector<GridRow>& rows);

/// CSV with header `fold,train_r2,val_r2,train_size,val_size` and a final
/// `mean` row.
void write_cv_csv(const std::filesystem::path& path, const CvReport& report);

} // namespace chromainv
