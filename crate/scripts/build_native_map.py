#!/usr/bin/env python3
"""Regenerate data/native_map.csv from the table below.

Codes are the two-letter language tags tweets carry. A country lists its
official and widely spoken national languages.
"""

import csv
import sys
from pathlib import Path

TABLE = """
AD ca; AE ar; AF fa ps; AG en; AI en; AL sq; AM hy; AO pt; AR es; AS en sm; AT de; AU en;
AW nl; AX sv; AZ az; BA bs hr sr; BB en; BD bn; BE nl fr de; BF fr; BG bg; BH ar; BI rn fr;
BJ fr; BL fr; BM en; BN ms; BO es; BQ nl; BR pt; BS en; BT dz; BW en tn; BY be ru; BZ en;
CA en fr; CD fr; CF fr; CG fr; CH de fr it; CI fr; CK en; CL es; CM fr en; CN zh; CO es;
CR es; CU es; CV pt; CW nl; CY el tr; CZ cs; DE de; DJ fr ar; DK da; DM en; DO es; DZ ar;
EC es; EE et; EG ar; EH ar; ER ti ar; ES es ca eu; ET am; FI fi sv; FJ en; FK en; FM en;
FO fo; FR fr; GA fr; GB en cy; GD en; GE ka; GF fr; GG en; GH en; GI en; GL kl da; GM en;
GN fr; GP fr; GQ es fr; GR el; GT es; GU en; GW pt; GY en; HK zh en; HN es; HR hr; HT fr ht;
HU hu; ID in; IE en ga; IL iw ar; IM en; IN hi bn ta te ur mr gu kn ml pa or; IQ ar ckb;
IR fa; IS is; IT it; JE en; JM en; JO ar; JP ja; KE sw en; KG ky ru; KH km; KI en; KM ar fr;
KN en; KP ko; KR ko; KW ar; KY en; KZ kk ru; LA lo; LB ar; LC en; LI de; LK si ta; LR en;
LS en; LT lt; LU lb fr de; LV lv; LY ar; MA ar; MC fr; MD ro; ME sr; MF fr; MG mg fr; MH en;
MK mk; ML fr; MM my; MN mn; MO zh pt; MP en; MQ fr; MR ar; MS en; MT mt en; MU en fr; MV dv;
MW en; MX es; MY ms; MZ pt; NA en; NC fr; NE fr; NG en; NI es; NL nl; NO no; NP ne; NR en;
NU en; NZ en; OM ar; PA es; PE es; PF fr; PG en; PH tl en; PK ur en; PL pl; PM fr; PR es en;
PS ar; PT pt; PW en; PY es; QA ar; RE fr; RO ro; RS sr; RU ru; RW rw en fr; SA ar; SB en;
SC en fr; SD ar en; SE sv; SG en zh ms ta; SH en; SI sl; SK sk; SL en; SM it; SN fr; SO so ar;
SR nl; SS en; ST pt; SV es; SX nl en; SY ar; SZ en; TC en; TD fr ar; TG fr; TH th; TJ tg;
TK en; TL pt; TM tk; TN ar; TO en; TR tr; TT en; TV en; TW zh; TZ sw en; UA uk; UG en sw;
US en; UY es; UZ uz; VA it; VC en; VE es; VG en; VI en; VN vi; VU en fr; WF fr; WS sm en;
YE ar; YT fr; ZA en af zu xh; ZM en; ZW en
"""


def main(out):
    rows = []
    for item in TABLE.replace("\n", " ").split(";"):
        parts = item.split()
        if not parts:
            continue
        iso, langs = parts[0], parts[1:]
        rows.extend((iso, lang) for lang in langs)
    countries = {r[0] for r in rows}
    assert len(countries) == 237, len(countries)
    with open(out, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["country_iso", "language_code"])
        w.writerows(sorted(rows))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "native_map.csv")
