#!/usr/bin/env python3
"""Seeded-violation trace corpus with a ground-truth manifest.

Every cookie is planted with an intended outcome; the manifest records the
outcome, party and per-iteration counts from the plan itself, so it never
depends on the auditor's own logic.

    python3 tools/fixtures/gen_corpus.py tests/fixtures
"""
import json
import random
import sys
from pathlib import Path
from urllib.parse import quote

SEED = 20231
BASE_TS = 1_700_000_000_000

ONETRUST_CATS = [
    ("C0001", "Strictly Necessary Cookies", False),
    ("C0002", "Performance Cookies", True),
    ("C0003", "Functional Cookies", True),
    ("C0004", "Targeting Cookies", True),
]
COOKIEBOT_CATS = [
    ("Necessary", "Necessary", False),
    ("Preferences", "Preferences", True),
    ("Statistics", "Statistics", True),
    ("Marketing", "Marketing", True),
]
NECESSARY = {"onetrust": "C0001", "cookiebot": "Necessary"}
REJECTABLE = {"onetrust": ["C0002", "C0003", "C0004"], "cookiebot": ["Preferences", "Statistics", "Marketing"]}


def rec(kind, **fields):
    d = {"kind": kind}
    d.update(fields)
    return json.dumps(d, separators=(",", ":"), ensure_ascii=False)


class Cookie:
    """One planted cookie.

    kind: compliant | ignored | undeclared | wrong | pre_only | out_of_scope
    decl: name pattern to declare (defaults to the name), decl_host likewise.
    """

    def __init__(self, kind, name, domain, value, decl=None, decl_host=None, path="/", phases=None, purpose="",
                 page=None):
        self.kind, self.name, self.domain, self.value = kind, name, domain, value
        self.page = page
        self.decl = decl if decl is not None else name
        self.decl_host = decl_host if decl_host is not None else domain
        self.path = path
        self.phases = phases
        self.purpose = purpose

    def outcome(self):
        return {"compliant": "compliant", "ignored": "ignored_rejection", "undeclared": "undeclared",
                "wrong": "wrong_category"}.get(self.kind)


def party(domain, site):
    return "first_party" if domain == site or domain.endswith("." + site) else "third_party"


def ga(rng):
    return "GA1.2.%d.%d" % (rng.randrange(10**8, 10**9), rng.randrange(1_600_000_000, 1_700_000_000))


def hexid(rng, n=32):
    return "".join(rng.choice("0123456789abcdef") for _ in range(n))


def uuid(rng):
    h = hexid(rng)
    return "%s-%s-4%s-a%s-%s" % (h[:8], h[8:12], h[13:16], h[17:20], h[20:32])


def fbp(rng):
    return "fb.1.%d.%d" % (rng.randrange(1_600_000_000_000, 1_700_000_000_000), rng.randrange(10**9, 10**10))


def raw_consent(cmp, choices, encode):
    if cmp == "onetrust":
        groups = ",".join("%s:%d" % (k, 1 if v else 0) for k, v in choices)
        return ("isGpcEnabled=0&datestamp=Tue+Oct+10+2023+10%3A00%3A00+GMT%2B0200&version=202309.1.0"
                "&isIABGlobal=false&hosts=&consentId=" + "0f1e2d3c-aaaa-bbbb-cccc-1234567890ab" +
                "&interactionCount=1&landingPath=NotLandingPage&groups=" + quote(groups, safe="") +
                "&AwaitingReconsent=false")
    flags = dict(choices)
    body = ("{stamp:'x9Yw2QbN1sTf8LmP0cZr',necessary:true,preferences:%s,statistics:%s,marketing:%s,"
            "method:'explicit',ver:1,utc:1700000000000,region:'de'}" %
            tuple("true" if flags[c] else "false" for c in ("Preferences", "Statistics", "Marketing")))
    return quote(body, safe="") if encode else body


class Site:
    def __init__(self, site, cmp, www=True):
        self.site, self.cmp = site, cmp
        self.host = ("www." + site) if www else site
        # region -> list of iteration plans; each plan is a dict
        self.plans = {}

    def add(self, region, cookies_per_iteration, banner, snapshot="ok", scope_domain=None, encode=False):
        self.plans[region] = [dict(cookies=c, banner=banner, snapshot=snapshot, scope=scope_domain, encode=encode)
                              for c in cookies_per_iteration]


def trace_lines(site, region, iteration, plan, rng):
    lines = [rec("meta", trace_version=1, site=site.site, region=region, iteration=iteration,
                 subpage_seed=1000 + iteration)]
    cmp = site.cmp
    scope = plan["scope"] or site.site
    cats = ONETRUST_CATS if cmp == "onetrust" else COOKIEBOT_CATS if cmp == "cookiebot" else []
    declared = cmp in ("onetrust", "cookiebot")
    if declared and plan["snapshot"] != "other":
        for cid, label, rejectable in cats:
            choice = "consent" if not rejectable else "not_consent"
            lines.append(rec("category", category_id=cid, label=label, rejectable=rejectable, consent_choice=choice))
        nec = NECESSARY[cmp]
        rej = REJECTABLE[cmp]
        seen = set()
        for i, c in enumerate(plan["cookies"]):
            if c.kind == "undeclared":
                continue
            targets = []
            if c.kind == "compliant":
                targets = [nec]
            elif c.kind == "wrong":
                targets = [nec, rej[i % len(rej)]]
            else:
                targets = [rej[i % len(rej)]]
            for cat in targets:
                k = (c.decl, c.decl_host, cat)
                if k in seen:
                    continue
                seen.add(k)
                lines.append(rec("declaration", name_pattern=c.decl, host=c.decl_host, category_id=cat,
                                 purpose_text=c.purpose, declared_duration="1 year"))

    subpages = ["https://%s/news/%d" % (site.host, iteration), "https://%s/about" % site.host]
    ts = BASE_TS + iteration * 10_000_000
    req = 0

    def request(page_url, url):
        nonlocal req
        req += 1
        rid = "r%d" % req
        lines.append(rec("request", request_id=rid, url=url, method="GET", initiator_frame="main", page_url=page_url))
        return rid

    home = "https://%s/" % site.host
    for phase_idx, phase in enumerate(("pre_consent", "post_reject", "subpage_visit")):
        page = home if phase != "subpage_visit" else subpages[0]
        by_domain = {}
        for c in plan["cookies"]:
            phases = c.phases or (["pre_consent", "post_reject"] if c.kind != "pre_only" else ["pre_consent"])
            if c.kind == "out_of_scope":
                phases = ["post_reject"]
            if phase not in phases:
                continue
            pg = (c.page or "https://partner-offers.net/landing") if c.kind == "out_of_scope" else page
            by_domain.setdefault((c.domain, pg), []).append(c)
        for (dom, pg), cs in sorted(by_domain.items()):
            rid = request(pg, "https://%s/collect?v=%d" % (dom, phase_idx))
            for c in cs:
                ts += 37
                lines.append(rec("cookie", request_id=rid, name=c.name, domain=c.domain, path=c.path, value=c.value,
                                 observed_at=ts, phase=phase))
        if phase == "post_reject" and plan["snapshot"] != "missing":
            snap_cmp = "other" if plan["snapshot"] == "other" else cmp
            if snap_cmp in ("onetrust", "cookiebot"):
                if plan["snapshot"] == "not_rejected":
                    choices = [(cid, True) for cid, _, _ in cats]
                else:
                    choices = [(cid, not rejectable) for cid, _, rejectable in cats]
                raw = raw_consent(snap_cmp, choices, plan["encode"])
            else:
                raw = ""
            if snap_cmp != "other" or site.cmp != "none":
                lines.append(rec("snapshot", cmp=snap_cmp, raw_value=raw, consent_cookie_domain=scope,
                                 captured_at=ts + 5, page_url=home))
    for sp in subpages:
        lines.append(rec("subpage", url=sp))
    lines.append(rec("banner", params=plan["banner"]))
    return lines


def build_sites(rng):
    sites = []

    def banner(reject=True, lifetime="365 days", model="opt-in", position="bottom", lang="en"):
        return {"reject_all_present": reject, "consent_lifetime": lifetime, "consent_model": model,
                "position": position, "language": lang}

    # 1. OneTrust news site, three regions, two iterations each.
    s = Site("dailyherald-news.com", "onetrust")
    base = lambda r: [
        Cookie("compliant", "OptanonConsent", "dailyherald-news.com", "isGpcEnabled=0&version=6", purpose="Stores consent choices"),
        Cookie("compliant", "session_id", "www.dailyherald-news.com", uuid(r), purpose="Keeps the user session"),
        Cookie("ignored", "_ga", "dailyherald-news.com", ga(r), purpose="Google Analytics visitor id"),
        Cookie("ignored", "_gat_UA123", "dailyherald-news.com", "1", decl="_gat_UAxxx"),
        Cookie("ignored", "IDE", "doubleclick.net", hexid(r, 40), decl_host="doubleclick.net"),
        Cookie("undeclared", "geo_city", "dailyherald-news.com", "37.7749,-122.4194", phases=["subpage_visit"]),
        Cookie("wrong", "lang_pref", "dailyherald-news.com", "en-US"),
        Cookie("pre_only", "_fbp", "dailyherald-news.com", fbp(r)),
        Cookie("out_of_scope", "partner_uid", "partner-offers.net", uuid(r)),
    ]
    s.add("EU", [base(rng), base(rng)], banner())
    s.add("UK", [base(rng), base(rng)], banner(lifetime="180 days"))
    us = lambda r: base(r) + [Cookie("undeclared", "ip_hint", "dailyherald-news.com", "203.0.113.7"),
                              Cookie("ignored", "fr", "facebook.com", hexid(r, 24), decl_host="facebook")]
    s.add("US-CA", [us(rng), us(rng) + [Cookie("undeclared", "ab_bucket", "dailyherald-news.com", "b")]],
          banner(reject=False, model="opt-out"))
    sites.append(s)

    # 2. Cookiebot retailer, two regions.
    s = Site("northwind-outlet.de", "cookiebot")
    base = lambda r: [
        Cookie("compliant", "CookieConsent", "northwind-outlet.de", "{stamp:'abc'}"),
        Cookie("compliant", "cart", "www.northwind-outlet.de", "3"),
        Cookie("ignored", "_gid", "northwind-outlet.de", "GA1.2.%d.%d" % (r.randrange(10**8, 10**9), 1700000000)),
        Cookie("ignored", "_hjSessionUser_1234", "northwind-outlet.de", hexid(r, 24), decl="_hjSessionUser_#"),
        Cookie("wrong", "test_cookie", "doubleclick.net", "CheckForPermission"),
        Cookie("undeclared", "visitor_ip", "northwind-outlet.de", "198.51.100.23"),
        Cookie("pre_only", "_uetsid", "northwind-outlet.de", hexid(r)),
    ]
    s.add("EU", [base(rng), base(rng)], banner(lang="de"), encode=True)
    s.add("US-CA", [base(rng) + [Cookie("ignored", "MUID", "bing.com", hexid(rng, 32).upper(), decl_host="bing.com")],
                    base(rng)], banner(lang="en", reject=False))
    sites.append(s)

    # 3. Site without a supported CMP: everything transmitted is undeclared.
    s = Site("quietforum.org", "none")
    base = lambda r: [
        Cookie("undeclared", "phpbb_sid", "quietforum.org", hexid(r)),
        Cookie("undeclared", "style", "quietforum.org", "dark"),
        Cookie("undeclared", "__qca", "quantserve.com", "P0-%d-%d" % (r.randrange(10**9), 1700000000000)),
        Cookie("pre_only", "tz", "quietforum.org", "Europe/Berlin"),
    ]
    s.add("EU", [base(rng)], banner(reject=False, model="notice-only"), snapshot="missing")
    s.add("UK", [base(rng)], banner(reject=False, model="notice-only"), snapshot="missing")
    sites.append(s)

    # 4. OneTrust, reject-all not reflected in the consent cookie in US-CA.
    s = Site("summitbank-online.com", "onetrust")
    base = lambda r: [
        Cookie("compliant", "JSESSIONID", "www.summitbank-online.com", hexid(r, 32).upper()),
        Cookie("ignored", "_gcl_au", "summitbank-online.com", "1.1.%d.%d" % (r.randrange(10**9), 1700000000)),
        Cookie("ignored", "AMCV_ABC%40AdobeOrg", "summitbank-online.com", "179643557%7CMCMID%7C" + str(r.randrange(10**15)),
               decl="AMCV_ABC%40AdobeOrg"),
    ]
    s.add("EU", [base(rng)], banner())
    s.add("US-CA", [base(rng)], banner(reject=False, model="opt-out"), snapshot="not_rejected")
    sites.append(s)

    # 5. Cookiebot, consent cookie scoped to www: pages on the shop subdomain are out of scope.
    s = Site("maplecraft-supplies.co.uk", "cookiebot")
    base = lambda r: [
        Cookie("compliant", "CookieConsent", "www.maplecraft-supplies.co.uk", "{stamp:'q'}"),
        Cookie("ignored", "_pin_unauth", "www.maplecraft-supplies.co.uk", "dWlkPU" + hexid(r, 20)),
        Cookie("undeclared", "currency", "www.maplecraft-supplies.co.uk", "GBP"),
        Cookie("wrong", "_clck", "maplecraft-supplies.co.uk", "%s|2|fg0|0|1400" % hexid(r, 8)),
        Cookie("out_of_scope", "shop_sess", "shop.maplecraft-supplies.co.uk", hexid(r),
               page="https://shop.maplecraft-supplies.co.uk/cart"),
    ]
    s.add("UK", [base(rng), base(rng)], banner(), scope_domain="www.maplecraft-supplies.co.uk")
    s.add("EU", [base(rng)], banner(lifetime="12 months"), scope_domain="www.maplecraft-supplies.co.uk")
    sites.append(s)

    # 6. OneTrust with declarations but the consent cookie was never captured.
    s = Site("cityrail-transit.com", "onetrust")
    base = lambda r: [Cookie("ignored", "_ga", "cityrail-transit.com", ga(r))]
    s.add("EU", [base(rng)], banner(), snapshot="missing")
    s.add("US-CA", [base(rng) + [Cookie("compliant", "route_pref", "cityrail-transit.com", "R12")]], banner())
    sites.append(s)

    # 7. Cookiebot, CMP-less snapshot (other) in one region.
    s = Site("brightpath-learning.edu", "cookiebot")
    base = lambda r: [
        Cookie("compliant", "CookieConsent", "brightpath-learning.edu", "{stamp:'z'}"),
        Cookie("ignored", "_ga_X1Y2Z3", "brightpath-learning.edu", "GS1.1.%d.1.1.%d.0.0.0" % (1700000000, 1700000100),
               decl="_ga_#"),
        Cookie("undeclared", "moodle_sess", "brightpath-learning.edu", hexid(r, 26)),
    ]
    s.add("EU", [base(rng), base(rng)], banner())
    s.add("UK", [base(rng)], banner(), snapshot="other")
    sites.append(s)

    # 8-14. Smaller sites filling out the matrix.
    specs = [
        ("pixelforge-games.io", "onetrust", ["EU", "US-CA"]),
        ("greenleaf-recipes.net", "cookiebot", ["EU", "UK", "US-CA"]),
        ("harborview-hotels.com", "onetrust", ["EU", "UK"]),
        ("techpulse-reviews.com", "cookiebot", ["EU", "US-CA"]),
        ("alpineweather.ch", "onetrust", ["EU", "UK", "US-CA"]),
        ("velocity-motors.com", "cookiebot", ["EU", "US-CA"]),
        ("openshelf-books.org", "onetrust", ["EU", "UK"]),
    ]
    for idx, (name, cmp, regions) in enumerate(specs):
        s = Site(name, cmp)
        for r_i, region in enumerate(regions):
            iters = []
            for it in range(1 + (idx + r_i) % 2):
                cs = [Cookie("compliant", "sid", "www." + name, hexid(rng, 16)),
                      Cookie("ignored", "_ga", name, ga(rng), purpose="Analytics: distinguishes users"),
                      Cookie("ignored", "_gads", name, "ID=%s:T=1700000000:S=ALNI_%s" % (hexid(rng, 16), hexid(rng, 10)),
                             decl="_gads"),
                      Cookie("undeclared", "loc", name, ["Berlin", "Paris", "Austin"][r_i % 3]),
                      Cookie("pre_only", "_fbp", name, fbp(rng))]
                # regional variation: more trackers outside the baseline
                for extra in range(r_i + it):
                    cs.append(Cookie("ignored", "trk%d" % extra, "ads-exchange%d.com" % idx, uuid(rng),
                                     decl="trk#", decl_host="ads-exchange%d.com" % idx))
                if (idx + r_i) % 3 == 0:
                    cs.append(Cookie("wrong", "consent_mode", name, "granted"))
                if region == "US-CA":
                    cs.append(Cookie("undeclared", "usprivacy", name, "1YNN"))
                iters.append(cs)
            b = banner(reject=(region != "US-CA" or idx % 2 == 0),
                       lifetime=["365 days", "180 days", "90 days"][(idx + r_i) % 3],
                       model="opt-out" if region == "US-CA" else "opt-in")
            s.add(region, iters, b, encode=(idx % 2 == 1))
        sites.append(s)
    return sites


def expected(site, region, plans):
    """Ground truth for one (site, region) from the plan alone."""
    def classified(plan):
        if site.cmp in ("onetrust", "cookiebot"):
            if plan["snapshot"] in ("missing", "not_rejected"):
                return False
        return True

    outcome_names = ["compliant", "ignored_rejection", "undeclared", "wrong_category"]
    union = {}
    counts, fp, tp = [], [], []
    for plan in plans:
        if not classified(plan):
            continue
        c_counts = dict.fromkeys(outcome_names, 0)
        c_tp = dict.fromkeys(outcome_names, 0)
        n_fp = n_tp = 0
        keys = set()
        for c in plan["cookies"]:
            out = c.outcome()
            if out is None:
                continue
            key = (c.name, c.domain, c.path)
            if key in keys:
                continue
            keys.add(key)
            if site.cmp == "none" or plan["snapshot"] == "other":
                out = "undeclared"
            p = party(c.domain, site.site)
            c_counts[out] += 1
            if p == "third_party":
                c_tp[out] += 1
                n_tp += 1
            else:
                n_fp += 1
            union[(key, out)] = p
        counts.append((c_counts, c_tp))
        fp.append(n_fp)
        tp.append(n_tp)
    n = len(counts)
    entry = {"site": site.site, "region": region, "iterations": len(plans), "iterations_classified": n,
             "cookies": [{"name": k[0], "domain": k[1], "path": k[2], "outcome": o, "party": p}
                         for (k, o), p in sorted(union.items())]}
    if n:
        entry["mean_outcome"] = {o: sum(c[0][o] for c in counts) / n for o in outcome_names}
        entry["mean_outcome_third_party"] = {o: sum(c[1][o] for c in counts) / n for o in outcome_names}
        entry["mean_cookies"] = sum(sum(c[0].values()) for c in counts) / n
        entry["mean_first_party"] = sum(fp) / n
        entry["mean_third_party"] = sum(tp) / n
    return entry


def canonical(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return " ".join(str(v).split())


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures")
    rng = random.Random(SEED)
    sites = build_sites(rng)
    corpus = out / "corpus"
    corpus.mkdir(parents=True, exist_ok=True)
    for f in corpus.glob("*.jsonl"):
        f.unlink()
    small = out / "corpus3"
    small.mkdir(parents=True, exist_ok=True)
    for f in small.glob("*.jsonl"):
        f.unlink()
    small_sites = {"dailyherald-news.com", "northwind-outlet.de", "quietforum.org"}
    single = out / "single_region"
    single.mkdir(parents=True, exist_ok=True)
    for f in single.glob("*.jsonl"):
        f.unlink()

    manifest = {"seed": SEED, "baseline": "EU", "sites": [], "deltas": [], "banner_diffs": []}
    for s in sites:
        for region, plans in sorted(s.plans.items()):
            for it, plan in enumerate(plans, start=1):
                text = "\n".join(trace_lines(s, region, it, plan, rng)) + "\n"
                fname = "%s__%s__it%d.jsonl" % (s.site, region, it)
                (corpus / fname).write_text(text, encoding="utf-8")
                if s.site in small_sites:
                    (small / fname).write_text(text, encoding="utf-8")
                if s.site in small_sites and region == "EU" and s.site != "quietforum.org":
                    (single / fname).write_text(text, encoding="utf-8")
            manifest["sites"].append(expected(s, region, plans))

    # Mean-mode deltas against EU, straight from the planted counts.
    by_key = {(e["site"], e["region"]): e for e in manifest["sites"]}
    for e in manifest["sites"]:
        b = by_key.get((e["site"], "EU"))
        if not b or "mean_cookies" not in b or "mean_cookies" not in e:
            continue
        manifest["deltas"].append({
            "site": e["site"], "region": e["region"], "baseline_region": "EU",
            "delta_cookies": e["mean_cookies"] - b["mean_cookies"],
            "delta_outcome": {o: e["mean_outcome"][o] - b["mean_outcome"][o] for o in e["mean_outcome"]},
        })
    manifest["deltas"].sort(key=lambda d: (d["site"], d["region"]))

    # Banner differences per site and region pair (highest iteration's banner).
    for s in sites:
        regions = sorted(s.plans)
        for i, a in enumerate(regions):
            for b in regions[i + 1:]:
                ba = {k: canonical(v) for k, v in s.plans[a][-1]["banner"].items()}
                bb = {k: canonical(v) for k, v in s.plans[b][-1]["banner"].items()}
                diff = sorted(k for k in set(ba) | set(bb) if ba.get(k) != bb.get(k))
                manifest["banner_diffs"].append({"site": s.site, "region_a": a, "region_b": b, "parameters": diff})

    (out / "corpus_manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    print("sites: %d, traces: %d" % (len(sites), len(list(corpus.glob("*.jsonl")))))


if __name__ == "__main__":
    main()
