// Umbrella header.
#pragma once

#include "conley/chain.hpp"
#include "conley/complex.hpp"
#include "conley/conley.hpp"
#include "conley/cubical.hpp"
#include "conley/document.hpp"
#include "conley/field.hpp"
#include "conley/graded.hpp"
#include "conley/linalg.hpp"
#include "conley/morse.hpp"
#include "conley/oracle.hpp"
#include "conley/order.hpp"
#include "conley/parallel.hpp"
#include "conley/persistence.hpp"
