#pragma once

#include "metadio/affine.hpp"
#include "metadio/decide.hpp"
#include "metadio/expsolve.hpp"
#include "metadio/expsum.hpp"
#include "metadio/frontend.hpp"
#include "metadio/groups.hpp"
#include "metadio/intlinalg.hpp"
#include "metadio/oracle.hpp"
#include "metadio/reduce.hpp"
#include "metadio/report.hpp"
#include "metadio/rings.hpp"
#include "metadio/system.hpp"
