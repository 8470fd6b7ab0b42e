#include "thermvisc/tensor.hpp"

namespace thermvisc {

template struct DefMatrix<2>;
template struct DefMatrix<3>;
template class SpdMatrix<2>;
template class SpdMatrix<3>;

}  // namespace thermvisc
