#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "netgeom/train.hpp"

namespace netgeom {

std::string base64_encode(const void* data, std::size_t n);
// Throws DataError on characters outside the alphabet or bad padding.
std::vector<unsigned char> base64_decode(const std::string& s);

// Column order is fixed: epoch, train_loss, test_loss, sigma_product,
// probe_sigma_max_mean, nu, lr. Values print as %.17g so reruns can be
// compared byte for byte.
void write_history_csv(const std::string& path,
                       const std::vector<HistoryRow>& rows);
std::vector<HistoryRow> read_history_csv(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace netgeom
