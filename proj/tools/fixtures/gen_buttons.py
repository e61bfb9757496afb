#!/usr/bin/env python3
"""Synthetic web pages with cookie banners for the button detector.

Gold elements are the ones that open a consent preference menu. Pages are
built as trees so gold locators are known exactly; the banner sometimes
lives in an iframe document.

    python3 tools/fixtures/gen_buttons.py tests/fixtures/buttons
"""
import html
import json
import random
import sys
from pathlib import Path

SEED = 7041
PAGES = 80
SMALL_SET = 50


class El:
    def __init__(self, tag, attrs=None, text="", children=None, gold=False):
        self.tag, self.attrs, self.text = tag, dict(attrs or {}), text
        self.children = list(children or [])
        self.gold = gold

    def add(self, *els):
        self.children.extend(els)
        return self


VOID = {"br", "img", "meta", "link", "input", "hr"}


def render(el, out):
    attrs = "".join(' %s="%s"' % (k, html.escape(v, quote=True)) for k, v in el.attrs.items())
    out.append("<%s%s>" % (el.tag, attrs))
    if el.tag in VOID:
        return
    if el.text:
        out.append(html.escape(el.text, quote=False))
    for c in el.children:
        render(c, out)
    out.append("</%s>" % el.tag)


def gold_paths(el, prefix, frame, acc):
    counts = {}
    for c in el.children:
        counts[c.tag] = counts.get(c.tag, 0) + 1
        path = "%s/%s[%d]" % (prefix, c.tag, counts[c.tag])
        if c.gold:
            acc.append("#%s%s" % (frame, path))
        gold_paths(c, path, frame, acc)
    return acc


def document(body, title):
    root = El("html", {"lang": "en"})
    head = El("head").add(El("title", text=title), El("meta", {"charset": "utf-8"}))
    root.add(head, body)
    return root


def to_html(root):
    out = ["<!DOCTYPE html>\n"]
    render(root, out)
    return "".join(out) + "\n"


GOLD_TEXTS = [
    "Cookie Settings", "Cookie settings", "Manage Preferences", "Manage preferences", "Customize",
    "Customise cookies", "Manage options", "Preferences", "Privacy settings", "More options",
    "Let me choose", "Change settings", "Manage cookies", "Configure", "Adjust preferences",
    "Review cookie settings", "Set preferences", "Options", "Show purposes", "Update consent",
    "Do Not Sell My Personal Information", "Your Privacy Choices", "Change my consent",
    "Einstellungen", "Paramètres des cookies", "Personalizar", "View cookie settings", "Advanced settings",
]
GOLD_CLASSES = ["btn btn-secondary", "cookie-settings-btn", "ot-sdk-show-settings", "cmp-preferences",
                "consent-manage", "button secondary", "link-button", "cc-settings", "cky-btn-customize",
                "banner__link", "js-prefs", "optanon-toggle-display"]
GOLD_IDS = ["onetrust-pc-btn-handler", "cookie-settings", "manage-prefs", "btn-customize", "CybotCookiebotDialogBodyButtonDetails",
            "prefsLink", "cmpSettings", "settingsButton"]
GOLD_ONCLICK = ["Cookiebot.renew()", "OneTrust.ToggleInfoDisplay()", "Didomi.preferences.show()",
                "UC_UI.showSecondLayer()", "openPrefs()", "klaro.show()"]
ACCEPT_TEXTS = ["Accept all", "Accept All Cookies", "I agree", "Allow all", "OK", "Got it", "Accept", "Agree and close",
                "Alle akzeptieren", "Tout accepter", "Allow cookies", "Continue"]
REJECT_TEXTS = ["Reject all", "Decline", "Reject All", "Necessary only", "Only essential cookies", "Refuse",
                "Alle ablehnen", "Continue without accepting"]
# Non-consent controls that share vocabulary with the consent ones.
CONFOUNDERS = ["Account settings", "Manage account", "Change region", "View all", "Update profile",
               "Notification preferences", "Privacy Center", "Change language", "Customize your feed",
               "Review your order", "Manage subscriptions", "Display options", "Choose a plan", "Settings",
               "Personal details", "View cart", "Update payment method"]
NAV = ["Home", "News", "World", "Business", "Sport", "Culture", "Travel", "Shop", "Deals", "Contact", "Blog",
       "Support", "Pricing", "Features", "About us", "Careers", "Login", "Sign up", "Subscribe", "Search"]
FOOTER = ["About", "Careers", "Press", "Terms of Use", "Privacy Policy", "Cookie Policy", "Accessibility", "Sitemap",
          "Contact us", "Advertise", "Help Center", "Imprint", "Legal notice", "Affiliates"]
NOTICE = [
    "We use cookies and similar technologies to improve your experience, measure audiences and show you "
    "personalised content and ads. You can accept all cookies or manage your choices at any time.",
    "This website uses cookies. Some are necessary for the site to work, others help us understand how you "
    "use the site so we can improve it.",
    "Wir verwenden Cookies, um Inhalte zu personalisieren und die Zugriffe auf unsere Website zu analysieren.",
    "By clicking accept you agree to the storing of cookies on your device to enhance site navigation and "
    "analyse site usage.",
    "Your privacy matters to us. We and our partners store and access information on your device.",
]
ARTICLE = ["Markets rallied on Tuesday after", "The new season opens with", "Five things to know about",
           "How to plan a weekend in", "Review: the latest phone from", "Opinion: why cities need more",
           "Live updates from", "Recipe of the week:"]
WORDS = ["river", "summer", "market", "energy", "design", "garden", "station", "council", "harbor", "museum"]


def slug(t):
    return "".join(ch if ch.isalnum() else "-" for ch in t.lower()).strip("-")


def nav_link(rng, t):
    a = El("a", {"href": "/" + slug(t)}, text=t)
    if rng.random() < 0.3:
        a.attrs["class"] = rng.choice(["nav-link", "menu__item", "navItem", "topnav-link"])
    return a


# Gold controls whose wording carries little signal.
HARD_GOLD_TEXTS = ["More", "Details", "Show details", "Einstellungen", "Weitere Optionen", "Learn more and customize",
                   "Paramètres", "Gestionar", "Instellingen", "Purposes", "Partners", "Other choices"]


def gold_element(rng):
    hard = rng.random() < 0.2
    text = rng.choice(HARD_GOLD_TEXTS if hard else GOLD_TEXTS)
    tag = rng.choices(["button", "a", "span", "div"], [5, 3, 1, 1])[0]
    attrs = {}
    if hard:
        if rng.random() < 0.6:
            attrs["class"] = rng.choice(["btn", "link", "button secondary", "banner__link", "js-more"])
    else:
        if rng.random() < 0.7:
            attrs["class"] = rng.choice(GOLD_CLASSES)
        if rng.random() < 0.35:
            attrs["id"] = rng.choice(GOLD_IDS)
        if rng.random() < 0.2:
            attrs["onclick"] = rng.choice(GOLD_ONCLICK)
    if tag == "a":
        attrs["href"] = rng.choice(["#", "javascript:void(0)", "#cookie-preferences", "/privacy#settings"])
    if not hard and rng.random() < 0.25:
        attrs["aria-label"] = rng.choice(["Open cookie settings", "Manage cookie preferences", "Customize consent",
                                          text])
    return El(tag, attrs, text=text, gold=True)


def banner(rng):
    box = El("div", {"id": rng.choice(["cookie-banner", "cmp-root", "consent", "onetrust-banner-sdk", "cc-window"]),
                     "class": rng.choice(["banner", "cookie-notice", "cmp-dialog", "cc-window cc-banner"]),
                     "role": "dialog"})
    box.add(El("div", {"class": "notice-text"}, text=rng.choice(NOTICE)))
    actions = El("div", {"class": rng.choice(["actions", "cmp-buttons", "btn-row"])})
    buttons = [El("button", {"class": rng.choice(["btn btn-primary", "accept", "cc-allow", "cmp-accept"]),
                             "id": rng.choice(["accept-all", "onetrust-accept-btn-handler", "allowAll", "acceptBtn"])},
                  text=rng.choice(ACCEPT_TEXTS))]
    if rng.random() < 0.55:
        buttons.append(El("button", {"class": rng.choice(["btn", "reject", "cc-deny", "cmp-reject"])},
                          text=rng.choice(REJECT_TEXTS)))
    buttons.append(gold_element(rng))
    rng.shuffle(buttons)
    actions.add(*buttons)
    box.add(actions)
    if rng.random() < 0.5:
        box.add(El("a", {"href": "/privacy-policy", "class": "policy-link"},
                   text=rng.choice(["Privacy Policy", "Cookie Policy", "Learn more", "Read more"])))
    if rng.random() < 0.3:
        box.add(El("span", {"class": "close", "aria-label": "Close"}, text="×"))
    return box


def page(rng, n):
    body = El("body", {"class": rng.choice(["home", "article", "shop", ""]) or "page"})
    header = El("div", {"class": "header"})
    header.add(El("a", {"href": "/", "class": "logo"}, text=rng.choice(["Daily", "Shop", "Hub", "Times"]) + str(n)))
    nav = El("div", {"class": "nav"})
    for t in rng.sample(NAV, rng.randint(4, 9)):
        nav.add(nav_link(rng, t))
    for t in rng.sample(CONFOUNDERS, rng.randint(1, 3)):
        a = nav_link(rng, t)
        if rng.random() < 0.3:
            a.attrs["class"] = rng.choice(["settings-link", "account-prefs", "btn btn-secondary", "options"])
        nav.add(a)
    header.add(nav)
    body.add(header)

    main = El("div", {"class": "main"})
    for _ in range(rng.randint(2, 6)):
        card = El("div", {"class": "card"})
        card.add(El("a", {"href": "/story/%d" % rng.randrange(10**5)},
                     text="%s %s" % (rng.choice(ARTICLE), rng.choice(WORDS))))
        card.add(El("span", {"class": "meta"}, text="%d min read" % rng.randint(2, 15)))
        if rng.random() < 0.5:
            card.add(El("button", {"class": "share"}, text=rng.choice(["Share", "Save", "Like", "Comment"])))
        main.add(card)
    # hidden noise: never a candidate
    main.add(El("div", {"style": "display:none"}, children=[El("button", text="Cookie Settings")]))
    body.add(main)

    frames = {}
    in_frame = rng.random() < 0.25
    if in_frame:
        fbody = El("body").add(banner(rng))
        frames["cmp"] = fbody
        body.add(El("div", {"class": "cmp-container"}, children=[El("iframe", {"src": "cmp.html", "title": "Consent"})]))
    else:
        b = banner(rng)
        if rng.random() < 0.5:
            body.children.insert(0, b)
        else:
            body.add(b)

    footer = El("div", {"class": "footer"})
    for t in rng.sample(FOOTER, rng.randint(4, 8)):
        footer.add(El("a", {"href": "/" + slug(t)}, text=t))
    if rng.random() < 0.5:
        t = rng.choice(CONFOUNDERS)
        footer.add(El("a", {"href": "/" + slug(t)}, text=t))
    if rng.random() < 0.45:
        footer.add(El("a", {"href": "#", "class": rng.choice(["ot-sdk-show-settings", "footer-link", "cookie-prefs"])},
                      text=rng.choice(["Cookie Settings", "Manage Cookies", "Cookie Preferences",
                                       "Do Not Sell or Share My Personal Information", "Privacy Choices"]),
                      gold=True))
    footer.add(El("span", {"class": "copyright"}, text="© 2023"))
    body.add(footer)
    return body, frames


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/buttons")
    pages_dir = out / "pages"
    pages_dir.mkdir(parents=True, exist_ok=True)
    for f in pages_dir.glob("*.html"):
        f.unlink()
    rng = random.Random(SEED)
    records = []
    total_gold = 0
    for n in range(1, PAGES + 1):
        body, frames = page(rng, n)
        doc = document(body, "Page %d" % n)
        name = "p%03d" % n
        (pages_dir / (name + ".html")).write_text(to_html(doc), encoding="utf-8")
        gold = gold_paths(El("#document", children=[doc]), "", "main", [])
        rec = {"kind": "page", "page": name, "html": "pages/%s.html" % name}
        if frames:
            rec["frames"] = {}
            for fname, fbody in frames.items():
                fdoc = document(fbody, "Consent")
                (pages_dir / ("%s_%s.html" % (name, fname))).write_text(to_html(fdoc), encoding="utf-8")
                rec["frames"][fname] = "pages/%s_%s.html" % (name, fname)
                gold += gold_paths(El("#document", children=[fdoc]), "", fname, [])
        rec["gold"] = sorted(gold)
        total_gold += len(gold)
        records.append(rec)
    lines = [json.dumps(r, separators=(",", ":"), ensure_ascii=False) for r in records]
    (out / "manifest.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / "manifest50.jsonl").write_text("\n".join(lines[:SMALL_SET]) + "\n", encoding="utf-8")
    print("pages: %d, gold: %d" % (len(records), total_gold))


if __name__ == "__main__":
    main()
