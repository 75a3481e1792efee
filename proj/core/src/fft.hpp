#pragma once

#include "isac/matrix.hpp"

namespace isac::detail {

/// In place: forward DFT (exp(-j...)) along every row, then unnormalized
/// inverse DFT (exp(+j...)) along every column.
void rdm_transform(CMatrix& values);

}  // namespace isac::detail
