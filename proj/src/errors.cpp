#include "hypadams/errors.hpp"

namespace hypadams {

void throw_domain(const std::string& what) { throw DomainError(what); }

} // namespace hypadams
