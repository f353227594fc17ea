#pragma once

// JSON encodings for matrices, states, channels and distributions.
// Matrices are {"rows": n, "cols": m, "re": [[...]], "im": [[...]]}.

#include <string>

#include "json.hpp"
#include "qchain/distribution.hpp"
#include "qchain/quantum.hpp"

namespace qchain {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

/// {"dim": d, "matrix": <matrix>}
Json state_to_json(const DensityOperator& rho);
DensityOperator state_from_json(const Json& j);

/// {"kraus": [<matrix>...], "pre_transpose": bool}
Json channel_to_json(const PositiveMapRep& map);
PositiveMapRep channel_from_json(const Json& j);

Json distribution_to_json(const Distribution& d);
/// Array of numbers.
Distribution distribution_from_json(const Json& j);

/// Scalar rounded to 12 significant digits; +-inf become the strings "inf" / "-inf".
Json scalar_json(double v);

/// Same rounding as text.
std::string format_scalar(double v);

/// Parses a file or throws MalformedInput.
Json read_json_file(const std::string& path);

/// Parses a string or throws MalformedInput.
Json parse_json_text(const std::string& text, const std::string& what);

}  // namespace qchain
