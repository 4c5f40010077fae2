"""Embedded certificate data: each vector is a list of (plus, minus) rooted-term pairs.

Rooted terms are written ``word:r=positions``.  The same data is re-read from
``data/certificate.txt`` by :func:`rhostar.certificate.parse_certificate_text`
and the two must agree.
"""

X1 = (
    ("1234:r=1,2", "1243:r=1,2"),
    ("1234:r=1,4", "1324:r=1,4"),
    ("1234:r=2,3", "4231:r=2,3"),
    ("1234:r=3,4", "2134:r=3,4"),
    ("1342:r=1,4", "1432:r=1,4"),
    ("1423:r=1,2", "1432:r=1,2"),
    ("2314:r=3,4", "3214:r=3,4"),
    ("2341:r=1,2", "2314:r=1,2"),
    ("2341:r=2,3", "1342:r=2,3"),
    ("2413:r=1,4", "2143:r=1,4"),
    ("3124:r=1,4", "3214:r=1,4"),
    ("3142:r=2,3", "2143:r=2,3"),
    ("3412:r=1,2", "3421:r=1,2"),
    ("3412:r=3,4", "4312:r=3,4"),
    ("4123:r=2,3", "3124:r=2,3"),
    ("4123:r=3,4", "1423:r=3,4"),
)
X2 = (
    ("1234:r=1,3", "1432:r=1,3"),
    ("1234:r=2,4", "3214:r=2,4"),
    ("2341:r=1,3", "2143:r=1,3"),
    ("4123:r=2,4", "2143:r=2,4"),
)
X3 = (
    ("1243:r=1,4", "1423:r=1,4"),
    ("1243:r=2,3", "3241:r=2,3"),
    ("1324:r=1,2", "1342:r=1,2"),
    ("1324:r=2,4", "2314:r=2,4"),
    ("1342:r=2,3", "2341:r=2,3"),
    ("1423:r=3,4", "4123:r=3,4"),
    ("2134:r=1,3", "2431:r=1,3"),
    ("2134:r=2,4", "3124:r=2,4"),
    ("2143:r=1,3", "2341:r=1,3"),
    ("2143:r=1,4", "2413:r=1,4"),
    ("2143:r=2,3", "3142:r=2,3"),
    ("2143:r=2,4", "4123:r=2,4"),
    ("2314:r=1,2", "2341:r=1,2"),
    ("2413:r=3,4", "4213:r=3,4"),
    ("3124:r=2,3", "4123:r=2,3"),
    ("3142:r=2,4", "4132:r=2,4"),
)
X4 = (
    ("1324:r=2,4", "2314:r=2,4"),
    ("1324:r=3,4", "3124:r=3,4"),
    ("1342:r=2,3", "2341:r=2,3"),
    ("1423:r=3,4", "4123:r=3,4"),
    ("2134:r=1,3", "2431:r=1,3"),
    ("2134:r=1,4", "2314:r=1,4"),
    ("2134:r=2,3", "4132:r=2,3"),
    ("2134:r=2,4", "3124:r=2,4"),
    ("2143:r=1,3", "2341:r=1,3"),
    ("2143:r=1,4", "2413:r=1,4"),
    ("2143:r=2,3", "3142:r=2,3"),
    ("2143:r=2,4", "4123:r=2,4"),
    ("2314:r=1,2", "2341:r=1,2"),
    ("2413:r=1,2", "2431:r=1,2"),
    ("3124:r=2,3", "4123:r=2,3"),
    ("3142:r=2,4", "4132:r=2,4"),
)
X5 = (
    ("1324:r=2,4", "2314:r=2,4"),
    ("1342:r=1,3", "1243:r=1,3"),
    ("1423:r=1,3", "1324:r=1,3"),
    ("2134:r=1,3", "2431:r=1,3"),
    ("2134:r=2,4", "3124:r=2,4"),
    ("3142:r=2,4", "4132:r=2,4"),
    ("3241:r=1,3", "3142:r=1,3"),
    ("4213:r=2,4", "1243:r=2,4"),
)
Y1 = (
    ("4321:r=3,4", "3421:r=3,4"),
    ("4321:r=1,4", "4231:r=1,4"),
    ("4321:r=2,3", "1324:r=2,3"),
    ("4321:r=1,2", "4312:r=1,2"),
    ("3241:r=3,4", "2341:r=3,4"),
    ("2431:r=1,4", "2341:r=1,4"),
    ("4213:r=1,4", "4123:r=1,4"),
    ("3214:r=2,3", "4213:r=2,3"),
    ("3214:r=1,2", "3241:r=1,2"),
    ("2413:r=2,3", "3412:r=2,3"),
    ("4132:r=1,2", "4123:r=1,2"),
    ("3142:r=1,4", "3412:r=1,4"),
    ("2143:r=1,2", "2134:r=1,2"),
    ("2143:r=3,4", "1243:r=3,4"),
    ("1432:r=3,4", "4132:r=3,4"),
    ("1432:r=2,3", "2431:r=2,3"),
)
Y2 = (
    ("4321:r=2,4", "2341:r=2,4"),
    ("4321:r=1,3", "4123:r=1,3"),
    ("3214:r=1,3", "3412:r=1,3"),
    ("1432:r=2,4", "3412:r=2,4"),
)
Y3 = (
    ("3421:r=2,4", "2431:r=2,4"),
    ("3421:r=1,3", "3124:r=1,3"),
    ("4231:r=2,4", "3241:r=2,4"),
    ("4231:r=1,2", "4213:r=1,2"),
    ("3241:r=1,2", "3214:r=1,2"),
    ("2431:r=2,3", "1432:r=2,3"),
    ("4312:r=2,3", "2314:r=2,3"),
    ("4312:r=1,4", "4132:r=1,4"),
    ("3412:r=1,3", "3214:r=1,3"),
    ("3412:r=2,3", "2413:r=2,3"),
    ("3412:r=1,4", "3142:r=1,4"),
    ("3412:r=2,4", "1432:r=2,4"),
    ("4213:r=2,3", "3214:r=2,3"),
    ("2413:r=2,4", "1423:r=2,4"),
    ("4132:r=3,4", "1432:r=3,4"),
    ("3142:r=3,4", "1342:r=3,4"),
)
Y4 = (
    ("4231:r=1,2", "4213:r=1,2"),
    ("4231:r=1,3", "4132:r=1,3"),
    ("3241:r=1,2", "3214:r=1,2"),
    ("2431:r=2,3", "1432:r=2,3"),
    ("4312:r=2,3", "2314:r=2,3"),
    ("4312:r=1,3", "4213:r=1,3"),
    ("4312:r=2,4", "1342:r=2,4"),
    ("4312:r=1,4", "4132:r=1,4"),
    ("3412:r=1,3", "3214:r=1,3"),
    ("3412:r=2,3", "2413:r=2,3"),
    ("3412:r=1,4", "3142:r=1,4"),
    ("3412:r=2,4", "1432:r=2,4"),
    ("4213:r=2,3", "3214:r=2,3"),
    ("2413:r=1,3", "2314:r=1,3"),
    ("4132:r=3,4", "1432:r=3,4"),
    ("3142:r=3,4", "1342:r=3,4"),
)
Y5 = (
    ("4231:r=1,2", "4213:r=1,2"),
    ("3241:r=1,4", "3421:r=1,4"),
    ("2431:r=3,4", "4231:r=3,4"),
    ("4312:r=2,3", "2314:r=2,3"),
    ("4312:r=1,4", "4132:r=1,4"),
    ("3142:r=3,4", "1342:r=3,4"),
    ("3124:r=1,2", "3142:r=1,2"),
    ("1423:r=2,3", "3421:r=2,3"),
)
Z1 = (
    ("1234:r=1,3", "1432:r=1,3"),
    ("1234:r=2,4", "3214:r=2,4"),
    ("2341:r=1,3", "2143:r=1,3"),
    ("4123:r=2,4", "2143:r=2,4"),
)
Z2 = (
    ("4321:r=2,4", "2341:r=2,4"),
    ("4321:r=1,3", "4123:r=1,3"),
    ("3214:r=1,3", "3412:r=1,3"),
    ("1432:r=2,4", "3412:r=2,4"),
)

M_SCALE = 112
M_NUMERATORS = (
    (86, 6, 40, 40, -40),
    (6, 136, 46, 46, -46),
    (40, 46, 101, -17, -38),
    (40, 46, -17, 101, -46),
    (-40, -46, -38, -46, 101),
)

X = (X1, X2, X3, X4, X5)
Y = (Y1, Y2, Y3, Y4, Y5)
