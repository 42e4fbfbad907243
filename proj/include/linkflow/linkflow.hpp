#ifndef LINKFLOW_LINKFLOW_HPP
#define LINKFLOW_LINKFLOW_HPP

#include "linkflow/correction.hpp"
#include "linkflow/error.hpp"
#include "linkflow/io.hpp"
#include "linkflow/kernel.hpp"
#include "linkflow/linalg.hpp"
#include "linkflow/network.hpp"
#include "linkflow/recoverability.hpp"
#include "linkflow/score.hpp"
#include "linkflow/simplex.hpp"
#include "linkflow/synthetic.hpp"

#endif  // LINKFLOW_LINKFLOW_HPP
