#ifndef IPD_IPD_HPP
#define IPD_IPD_HPP

#include "ipd/dataset.hpp"
#include "ipd/dbscan.hpp"
#include "ipd/driver.hpp"
#include "ipd/error.hpp"
#include "ipd/generators.hpp"
#include "ipd/io.hpp"
#include "ipd/metrics.hpp"
#include "ipd/neighbor_index.hpp"
#include "ipd/params.hpp"
#include "ipd/prototype.hpp"
#include "ipd/representatives.hpp"
#include "ipd/sampling.hpp"
#include "ipd/stability.hpp"
#include "ipd/union_find.hpp"

#endif  // IPD_IPD_HPP
