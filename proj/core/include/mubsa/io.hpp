#ifndef MUBSA_IO_HPP
#define MUBSA_IO_HPP

#include "mubsa/mub_family.hpp"
#include "mubsa/protocol.hpp"
#include "mubsa/spectra.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace mubsa {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);
double parse_double(const std::string& text);

/// Complex matrix text block: header "<d> <k>" (dimension and base tag,
/// k = 0 for payloads that are not bases), then one row per line with
/// "re,im" entries joined by semicolons.
void write_matrix_file(const std::string& path, const Eigen::MatrixXcd& m,
                       int tag);
Eigen::MatrixXcd read_matrix_file(const std::string& path, int* tag = nullptr);

/// Whole family: d+1 square blocks, k = 1..d+1.
void write_family_file(const std::string& path, const MubFamily& family);
MubFamily read_family_file(const std::string& path);

/// Complex vector: first line "<d>", then d lines "re,im".
void write_vector_file(const std::string& path, const Eigen::VectorXcd& v);
Eigen::VectorXcd read_vector_file(const std::string& path);

/// Sample batch (columns are samples): header "<count> <d>", then one
/// sample per line with d "re,im" pairs joined by semicolons.
void write_samples_file(const std::string& path,
                        const Eigen::MatrixXcd& samples);
Eigen::MatrixXcd read_samples_file(const std::string& path);

/// Spectra CSV: header "<d>,<trace>", then d+1 rows of d reals.
void write_spectra_file(const std::string& path,
                        const CompleteSpectra& spectra);
CompleteSpectra read_spectra_file(const std::string& path);

/// Flat key-value simulator config ("key = value" lines). Keys: d, n,
/// slots_per_user, rounds, noise_power, quant_mag, quant_phase, gap,
/// replicates, seed.
void write_protocol_config(const std::string& path,
                           const ProtocolConfig& config);
ProtocolConfig read_protocol_config(const std::string& path);

/// Metrics CSV: one row per tracked ordered pair plus a summary row.
void write_metrics_file(const std::string& path,
                        const ProtocolMetrics& metrics);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
std::string file_digest(const std::string& path);

} // namespace mubsa

#endif // MUBSA_IO_HPP
