#include "fog/common/random.hpp"

#include <sstream>
#include <stdexcept>

namespace fog {

std::string Rng::state() const
{
    std::ostringstream os;
    os << engine_;
    return os.str();
}

void Rng::restore(const std::string& state)
{
    std::istringstream is(state);
    is >> engine_;
    if (!is)
        throw std::runtime_error("Rng::restore: malformed generator state");
}

} // namespace fog
